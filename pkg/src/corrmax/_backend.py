"""Kernel backend selection.

The compiled extension is used when importable; ``CORRMAX_BACKEND=python``
forces the numpy fallback, ``CORRMAX_BACKEND=compiled`` makes a missing
extension an error.
"""

import logging
import os

from . import _fallback

log = logging.getLogger(__name__)

try:
    from . import _core as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled


def available():
    return sorted(BACKENDS)


def resolve(backend=None):
    """Return the kernel module for ``backend`` (name, module or None)."""
    if backend is not None and not isinstance(backend, str):
        return backend
    name = backend or os.environ.get("CORRMAX_BACKEND", "auto")
    if name == "auto":
        return _compiled if _compiled is not None else _fallback
    try:
        return BACKENDS[name]
    except KeyError:
        if name == "compiled":
            raise ImportError("corrmax._core is not built; run `pip install -e .`") from None
        raise ValueError(f"unknown backend {name!r}; choose from {available()}") from None


def default_workers():
    env = os.environ.get("CORRMAX_THREADS")
    if env:
        try:
            w = int(env)
        except ValueError:
            log.warning("ignoring non-integer CORRMAX_THREADS=%r", env)
        else:
            if w >= 1:
                return w
    return os.cpu_count() or 1
