"""Univariate laws used to populate i.i.d. arrays.

A :class:`DistributionSpec` is a base law plus an affine wrapper
``loc + scale * Y``; :meth:`DistributionSpec.standardized` uses the wrapper
to produce mean-zero, unit-variance versions of heavy-tailed laws.

Draws go through :mod:`corrmax.rng`, so entry ``(k, i)`` of a sample depends
only on ``(seed, k, i)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from . import rng
from .errors import DomainError, UnsupportedError

KINDS = ("normal", "uniform", "rademacher", "student_t", "pareto", "point_mass")
_ARITY = {"normal": 2, "uniform": 2, "rademacher": 0, "student_t": 1, "pareto": 2, "point_mass": 1}
_DEFAULTS = {"normal": (0.0, 1.0), "uniform": (0.0, 1.0), "rademacher": (), "point_mass": (0.0,)}
_MAX_ATTEMPTS = 64


@dataclass(frozen=True)
class DistributionSpec:
    """A named law: ``kind`` with ``params``, then ``loc + scale * X``.

    ``params`` per kind: ``normal (mu, sigma)``, ``uniform (a, b)``,
    ``rademacher ()``, ``student_t (nu,)``, ``pareto (x_m, tail_index)``,
    ``point_mass (c,)``.
    """

    kind: str
    params: tuple = ()
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedError(f"unknown distribution kind {self.kind!r}; known: {', '.join(KINDS)}")
        params = tuple(float(x) for x in self.params)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "loc", float(self.loc))
        object.__setattr__(self, "scale", float(self.scale))
        if len(params) != _ARITY[self.kind]:
            raise DomainError(f"{self.kind} takes {_ARITY[self.kind]} parameter(s), got {len(params)}")
        if not all(math.isfinite(x) for x in params + (self.loc, self.scale)):
            raise DomainError("distribution parameters must be finite")
        if not self.scale > 0:
            raise DomainError("scale must be > 0")
        k, q = self.kind, params
        if k == "normal" and not q[1] > 0:
            raise DomainError("normal needs sigma > 0")
        if k == "uniform" and not q[0] < q[1]:
            raise DomainError("uniform needs a < b")
        if k == "student_t" and not q[0] > 0:
            raise DomainError("student_t needs nu > 0")
        if k == "pareto" and not (q[0] > 0 and q[1] > 0):
            raise DomainError("pareto needs x_m > 0 and tail_index > 0")

    # -- construction -------------------------------------------------
    @classmethod
    def parse(cls, text):
        """Parse ``"name:p1,p2"`` (e.g. ``normal:0,1``, ``student_t:3``).

        A ``std_`` prefix (``std_student_t:3``) returns the standardized law.
        """
        text = text.strip()
        standardize = text.startswith("std_")
        if standardize:
            text = text[4:]
        name, _, rest = text.partition(":")
        name = name.strip()
        if name not in KINDS:
            raise UnsupportedError(f"unknown distribution {name!r}; known: {', '.join(KINDS)}")
        if rest.strip():
            try:
                params = tuple(float(x) for x in rest.split(","))
            except ValueError:
                raise DomainError(f"bad parameters in {text!r}") from None
        elif name in _DEFAULTS:
            params = _DEFAULTS[name]
        else:
            raise DomainError(f"{name} needs parameters, e.g. {name}:3")
        spec = cls(name, params)
        return spec.standardized() if standardize else spec

    def standardized(self):
        """Same law rescaled to mean 0 and variance 1."""
        base = DistributionSpec(self.kind, self.params)
        v = base.var()
        if not math.isfinite(v):
            raise DomainError(f"{self}: variance is infinite, cannot standardize")
        if v <= 0:
            raise DomainError(f"{self}: degenerate law cannot be standardized")
        s = math.sqrt(v)
        return DistributionSpec(self.kind, self.params, loc=-base.mean() / s, scale=1.0 / s)

    # -- descriptors --------------------------------------------------
    def __str__(self):
        body = ",".join(_fmt(x) for x in self.params)
        s = f"{self.kind}:{body}" if body else self.kind
        if self.loc != 0.0 or self.scale != 1.0:
            s += f"[loc={_fmt(self.loc)},scale={_fmt(self.scale)}]"
        return s

    def to_dict(self):
        return {"kind": self.kind, "params": list(self.params), "loc": self.loc, "scale": self.scale}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], tuple(d.get("params", ())), d.get("loc", 0.0), d.get("scale", 1.0))

    @property
    def is_degenerate(self):
        return self.kind == "point_mass"

    @property
    def has_density(self):
        return self.kind in ("normal", "uniform", "student_t", "pareto")

    def _base_moments(self):
        k, q = self.kind, self.params
        if k == "normal":
            return q[0], q[1] ** 2
        if k == "uniform":
            return (q[0] + q[1]) / 2, (q[1] - q[0]) ** 2 / 12
        if k == "rademacher":
            return 0.0, 1.0
        if k == "point_mass":
            return q[0], 0.0
        if k == "student_t":
            nu = q[0]
            mean = 0.0 if nu > 1 else math.nan
            var = nu / (nu - 2) if nu > 2 else math.inf
            return mean, var
        xm, a = q
        mean = a * xm / (a - 1) if a > 1 else math.inf
        var = xm * xm * a / ((a - 1) ** 2 * (a - 2)) if a > 2 else math.inf
        return mean, var

    def mean(self):
        return self.loc + self.scale * self._base_moments()[0]

    def var(self):
        return self.scale**2 * self._base_moments()[1]

    def std(self):
        return math.sqrt(self.var())

    def frozen(self):
        """The law as a frozen :mod:`scipy.stats` distribution (continuous kinds)."""
        k, q = self.kind, self.params
        if k == "normal":
            law, shape, bl, bs = stats.norm, (), q[0], q[1]
        elif k == "uniform":
            law, shape, bl, bs = stats.uniform, (), q[0], q[1] - q[0]
        elif k == "student_t":
            law, shape, bl, bs = stats.t, (q[0],), 0.0, 1.0
        elif k == "pareto":
            law, shape, bl, bs = stats.pareto, (q[1],), 0.0, q[0]
        else:
            raise UnsupportedError(f"{k} has no density")
        return law(*shape, loc=self.loc + self.scale * bl, scale=self.scale * bs)

    def support_points(self):
        """``(values, probabilities)`` for the discrete kinds."""
        if self.kind == "point_mass":
            return np.array([self.loc + self.scale * self.params[0]]), np.array([1.0])
        if self.kind == "rademacher":
            return np.array([self.loc - self.scale, self.loc + self.scale]), np.array([0.5, 0.5])
        raise UnsupportedError(f"{self.kind} is continuous")

    # -- sampling -----------------------------------------------------
    def draw(self, seed, rows, p, col_start=0, backend=None):
        """Entries ``(k, i)`` for ``k`` in ``range(*rows)``, ``i`` in
        ``range(col_start, col_start + p)``; shape ``(len(rows), p)``."""
        base = self._draw_base(seed, rows, p, col_start, backend)
        if self.loc != 0.0 or self.scale != 1.0:
            base = self.loc + self.scale * base
        return base

    def _draw_base(self, seed, rows, p, col_start, backend):
        k, q = self.kind, self.params
        shape = (rows[1] - rows[0], p)
        if k == "point_mass":
            return np.full(shape, q[0])
        if k == "rademacher":
            bits = rng.bits_block(seed, rows, p, 0, col_start, backend)
            return np.where(bits >> np.uint64(63), 1.0, -1.0)
        u = rng.uniform_block(seed, rows, p, 0, col_start, backend)
        if k == "normal":
            return q[0] + q[1] * special.ndtri(u)
        if k == "uniform":
            return q[0] + (q[1] - q[0]) * u
        if k == "pareto":
            return q[0] * np.power(u, -1.0 / q[1])
        return self._draw_t(seed, rows, p, col_start, backend)

    def _draw_t(self, seed, rows, p, col_start, backend):
        # Bailey's polar method. Attempt r reads streams 2r+1 and 2r+2, so
        # every entry's retry sequence is a function of its own index only.
        nu = self.params[0]
        out = np.empty((rows[1] - rows[0], p))
        todo = np.ones(out.shape, dtype=bool)
        for attempt in range(_MAX_ATTEMPTS):
            a = 2.0 * rng.uniform_block(seed, rows, p, 2 * attempt + 1, col_start, backend) - 1.0
            b = 2.0 * rng.uniform_block(seed, rows, p, 2 * attempt + 2, col_start, backend) - 1.0
            w = a * a + b * b
            ok = todo & (w <= 1.0) & (w > 0.0)
            if ok.any():
                wa, aa = w[ok], a[ok]
                out[ok] = aa * np.sqrt(nu * (np.power(wa, -2.0 / nu) - 1.0) / wa)
                todo &= ~ok
            if not todo.any():
                return out
        raise RuntimeError("polar sampler did not terminate")  # probability < 1e-40


def normal(mu=0.0, sigma=1.0):
    return DistributionSpec("normal", (mu, sigma))


def uniform(a=0.0, b=1.0):
    return DistributionSpec("uniform", (a, b))


def rademacher():
    return DistributionSpec("rademacher", ())


def student_t(nu):
    return DistributionSpec("student_t", (nu,))


def pareto(x_m, tail_index):
    return DistributionSpec("pareto", (x_m, tail_index))


def point_mass(c=0.0):
    return DistributionSpec("point_mass", (c,))


def _fmt(x):
    return repr(int(x)) if float(x).is_integer() else repr(float(x))
