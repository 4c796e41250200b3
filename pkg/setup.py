import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback still works without the extension
    cythonize = None

compile_args = ["-O3"]
if os.environ.get("CORRMAX_NATIVE", "1") == "1":
    compile_args.append("-march=native")

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "corrmax._core",
                ["src/corrmax/_core.pyx"],
                include_dirs=["src/corrmax"],
                extra_compile_args=compile_args,
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
