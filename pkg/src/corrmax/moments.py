"""Moment and series diagnostics for the strong-law hypotheses.

For an i.i.d. law ``X`` these routines decide, where a moment rule allows it,
whether

* the power-normalized law (``W_n / n**alpha -> 0``) has its moment
  hypothesis satisfied: ``E|X|**(3/alpha) < inf`` suffices and
  ``E|X|**(2/alpha) < inf`` is necessary;
* the logarithmic law (constant 2 under ``sqrt(n log n)``) has its hypothesis
  satisfied: ``E|X|**6 < inf`` suffices and ``E|X|**beta < inf`` for every
  ``beta < 6`` is necessary (probed at ``beta = 5.5``).

Anything in between is reported as ``indeterminate``. Divergent moments are
decided by tail-index rules only, never by numerical overflow.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .distributions import DistributionSpec
from .errors import DomainError, UnsupportedError

INFINITE = math.inf

HOLDS = "holds_sufficient"
FAILS = "fails_necessary"
INDETERMINATE = "indeterminate"

#: Order of the necessity probe for the logarithmic law.
LL_PROBE_ORDER = 5.5

_MOMENT_RTOL = 1e-8
_TAIL_RTOL = 1e-6


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str
    verdict: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self):
        return {"condition": self.condition, "verdict": self.verdict, "evidence": jsonable(self.evidence)}


@dataclass(frozen=True)
class LLFunctionals:
    """Monte Carlo means of ``(X1 X2)^6 / log(e+|X1 X2|)^3`` and
    ``(X1 X2)^4 / log(e+|X1 X2|)^2`` with standard errors."""

    f27: float
    f28: float
    se27: float
    se28: float
    n_mc: int
    seed: int

    def to_dict(self):
        return jsonable(self.__dict__)


@dataclass(frozen=True)
class SeriesPoint:
    n: int
    threshold: float
    term: float
    partial_sum: float


def jsonable(obj):
    """Replace non-finite floats by the strings ``"inf"``, ``"-inf"``, ``"nan"``."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _tail_index(dist):
    if dist.kind == "student_t":
        return dist.params[0]
    if dist.kind == "pareto":
        return dist.params[1]
    return math.inf


def abs_moment(dist, r):
    """``E|X|**r``; :data:`INFINITE` when the tail-index rule says it diverges.

    Continuous laws are integrated with adaptive quadrature (relative
    tolerance 1e-8); half-lines are mapped to finite intervals by
    ``x = c + s tan(u)``.
    """
    if not r > 0:
        raise DomainError(f"moment order must be > 0, got {r}")
    if not isinstance(dist, DistributionSpec):
        raise UnsupportedError(f"not a DistributionSpec: {dist!r}")
    if not dist.has_density:
        vals, probs = dist.support_points()
        return float(np.sum(probs * np.abs(vals) ** r))
    if r >= _tail_index(dist):
        return INFINITE
    fr = dist.frozen()
    lo, hi = (float(x) for x in fr.support())
    s = float(fr.ppf(0.75) - fr.ppf(0.25))
    cuts = sorted({lo, hi} | ({0.0} if lo < 0.0 < hi else set()))
    center = float(fr.median())

    def f(x):
        return abs(x) ** r * fr.pdf(x)

    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if math.isfinite(a) and math.isfinite(b):
            pts = [center] if a < center < b else None
            val, _ = integrate.quad(f, a, b, points=pts, epsrel=_MOMENT_RTOL, epsabs=0.0, limit=500)
        elif math.isfinite(a):
            val = _half_line(f, a, s, +1)
        else:
            val = _half_line(f, b, s, -1)
        total += val
    return total


def _half_line(f, c, s, sign):
    def g(u):
        t = math.tan(u)
        return f(c + sign * s * t) * s * (1.0 + t * t)

    val, _ = integrate.quad(g, 0.0, math.pi / 2, epsrel=_MOMENT_RTOL, epsabs=0.0, limit=500)
    return val


def _verdict(sufficient, necessary):
    if math.isfinite(sufficient):
        return HOLDS
    if not math.isfinite(necessary):
        return FAILS
    return INDETERMINATE


def slln_condition_verdict(dist, alpha):
    """Moment verdict for ``sum_n P(max_{i<j} |X_i X_j| >= n**alpha) < inf``.

    ``E|X|**(3/alpha) < inf`` is sufficient and ``E|X|**(2/alpha) < inf``
    necessary. The additional centering requirement (``E X = 0`` when
    ``alpha <= 1``) is reported in the evidence, not folded into the verdict.
    """
    if not alpha > 0.5:
        raise DomainError(f"alpha must exceed 1/2, got {alpha}")
    r_suf, r_nec = 3.0 / alpha, 2.0 / alpha
    m_suf, m_nec = abs_moment(dist, r_suf), abs_moment(dist, r_nec)
    mean = dist.mean() if math.isfinite(abs_moment(dist, 1.0)) else math.nan
    evidence = {
        "distribution": str(dist),
        "sufficient_order": r_suf,
        "sufficient_moment": m_suf,
        "necessary_order": r_nec,
        "necessary_moment": m_nec,
        "mean": mean,
        "mean_zero_required": alpha <= 1.0,
    }
    return ConditionVerdict(f"SLLN({alpha:g})", _verdict(m_suf, m_nec), evidence)


def ll_condition_verdict(dist, *, n_mc=None, seed=0):
    """Moment verdict for the logarithmic law.

    ``E|X|**6 < inf`` is sufficient; ``E|X|**5.5 = inf`` proves failure. If
    ``n_mc`` is given, Monte Carlo estimates of the two sandwiching
    functionals are added to the evidence (they never change the verdict).
    """
    m6 = abs_moment(dist, 6.0)
    mp = abs_moment(dist, LL_PROBE_ORDER)
    evidence = {
        "distribution": str(dist),
        "sufficient_order": 6.0,
        "sufficient_moment": m6,
        "necessary_order": LL_PROBE_ORDER,
        "necessary_moment": mp,
    }
    if n_mc:
        evidence["functionals"] = ll_functionals(dist, n_mc, seed).to_dict()
    return ConditionVerdict("LL", _verdict(m6, mp), evidence)


def ll_functionals(dist, n_mc, seed=0, *, backend=None):
    """Monte Carlo estimates over ``n_mc`` independent pairs ``(X1, X2)``.

    Finite-sample estimates only: a divergent expectation shows up as
    instability across seeds, it is not decided here.
    """
    if n_mc < 10_000:
        raise DomainError(f"n_mc must be >= 10000, got {n_mc}")
    pairs = dist.draw(seed, (0, int(n_mc)), 2, backend=backend)
    prod = pairs[:, 0] * pairs[:, 1]
    with np.errstate(over="ignore", invalid="ignore"):
        lg = np.log(math.e + np.abs(prod))
        h27 = prod**6 / lg**3
        h28 = prod**4 / lg**2
    n = float(n_mc)
    return LLFunctionals(
        f27=float(np.mean(h27)),
        f28=float(np.mean(h28)),
        se27=float(np.std(h27, ddof=1) / math.sqrt(n)),
        se28=float(np.std(h28, ddof=1) / math.sqrt(n)),
        n_mc=int(n_mc),
        seed=int(seed),
    )


# -- order statistics of |X| -------------------------------------------------


def _abs_support(dist):
    """Distinct values and probabilities of ``|X|`` for a discrete law."""
    vals, probs = dist.support_points()
    z = np.abs(vals)
    uz = np.unique(z)
    return uz, np.array([probs[z == u].sum() for u in uz])


def _top_two_discrete(dist, n, a):
    z, q = _abs_support(dist)
    cdf = np.cumsum(q)
    below = cdf - q  # P(|X| < z_b)
    total = 0.0
    for c in range(len(z)):
        for b in range(c + 1):
            if z[b] * z[c] < a:
                continue
            if b < c:
                total += n * q[c] * (cdf[b] ** (n - 1) - below[b] ** (n - 1))
            else:
                total += (cdf[c] ** n - below[c] ** n) - n * q[c] * below[c] ** (n - 1)
    return min(1.0, max(0.0, total))


class _AbsLaw:
    """Log-density, log-CDF and log-survival of ``|X|`` for a continuous law."""

    def __init__(self, dist):
        self.fr = dist.frozen()
        lo, hi = (float(x) for x in self.fr.support())
        self.zlo = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
        self.zhi = max(abs(lo), abs(hi))

    def logpdf(self, z):
        with np.errstate(divide="ignore"):
            return np.logaddexp(self.fr.logpdf(z), self.fr.logpdf(-z))

    def logsf(self, z):
        with np.errstate(divide="ignore"):
            return np.logaddexp(self.fr.logsf(z), self.fr.logcdf(-z))

    def logcdf(self, z):
        ls = self.logsf(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ls > -math.log(2.0), np.log(-np.expm1(ls)), np.log1p(-np.exp(ls)))

    def upper(self):
        if math.isfinite(self.zhi):
            return self.zhi
        return float(max(abs(self.fr.isf(1e-300)), abs(self.fr.ppf(1e-300))))


def top_two_product_tail(dist, n, a):
    """``P(Z_{n:1} Z_{n:2} >= a)`` for the two largest of ``|X_1|..|X_n|``.

    Equals ``P(max_{i<j} |X_i X_j| >= a)``. Continuous laws integrate the
    joint order-statistic density over the second-largest value ``z``::

        int n (n-1) G(z)^(n-2) g(z) [1 - G(max(z, a/z))] dz

    in log space (``z = e^s``) so that tails of hundreds of orders of
    magnitude stay representable; target relative accuracy 1e-6. Discrete
    laws are summed exactly.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a}")
    if a == 0:
        return 1.0
    if not dist.has_density:
        return _top_two_discrete(dist, int(n), float(a))
    law = _AbsLaw(dist)
    zmax = law.upper()
    n = int(n)
    log_c = math.log(n) + math.log(n - 1)
    sqrt_a = math.sqrt(a)

    def ell(s):
        s = np.asarray(s, dtype=float)
        z = np.exp(s)
        out = log_c + law.logpdf(z) + law.logsf(np.maximum(z, a / z)) + s
        if n > 2:
            out = out + (n - 2) * law.logcdf(z)
        return np.where(np.isnan(out), -np.inf, out)

    s_hi = math.log(zmax) + 0.1
    s_lo = math.log(a) - math.log(zmax) - 1.0
    if law.zlo > 0:
        s_lo = max(s_lo, math.log(law.zlo) - 0.1)
    grid = np.linspace(s_lo, s_hi, 20001)
    vals = ell(grid)
    peak = float(np.max(vals))
    if not math.isfinite(peak):
        return 0.0
    live = np.flatnonzero(vals - peak > -80.0)
    lo = grid[max(live[0] - 2, 0)]
    hi = grid[min(live[-1] + 2, len(grid) - 1)]
    breaks = [grid[int(np.argmax(vals))], math.log(sqrt_a)]
    for z in (law.zlo, law.zhi):
        if 0 < z < math.inf:
            breaks.append(math.log(z))
    breaks = sorted(b for b in set(breaks) if lo < b < hi)

    val = _composite_gauss([lo] + breaks + [hi], lambda x: np.exp(ell(x) - peak))
    if val <= 0:
        return 0.0
    return float(min(1.0, math.exp(peak + math.log(val))))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _composite_gauss(edges, f, rtol=_TAIL_RTOL * 1e-2, max_panels=1 << 14):
    """Vectorized composite 16-point Gauss-Legendre over each ``[edges[k], edges[k+1]]``,
    doubling the panel count until two successive estimates agree to ``rtol``."""

    def estimate(m):
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            cuts = np.linspace(a, b, m + 1)
            half = 0.5 * np.diff(cuts)
            mid = 0.5 * (cuts[1:] + cuts[:-1])
            x = mid[:, None] + half[:, None] * _GL_X[None, :]
            total += float(np.sum(half[:, None] * _GL_W[None, :] * f(x)))
        return total

    m = 8
    prev = estimate(m)
    while m < max_panels:
        m *= 2
        cur = estimate(m)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    return prev


def series_threshold(mode, n, alpha=None):
    if mode == "slln":
        if alpha is None or not alpha > 0.5:
            raise DomainError("slln mode needs alpha > 1/2")
        return float(n) ** alpha
    if mode == "ll":
        return math.sqrt(n * math.log(n))
    raise DomainError(f"mode must be 'slln' or 'll', got {mode!r}")


def series_grid(N, exact_upto=64, per_decade=40):
    """Integers ``2..min(N, exact_upto)`` then a geometric grid to ``N``
    that always contains every power of ten in range."""
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    pts = set(range(2, min(N, exact_upto) + 1))
    if N > exact_upto:
        k = math.ceil(per_decade * math.log10(N / exact_upto))
        pts.update(int(round(x)) for x in np.geomspace(exact_upto, N, k + 1))
        pts.update(10**e for e in range(2, int(math.log10(N)) + 1))
    pts.add(int(N))
    return sorted(p for p in pts if 2 <= p <= N)


def series_partial_sums(dist, mode, N, alpha=None):
    """Approximate partial sums ``sum_{n=2}^{m} P(Z_{m:1} Z_{m:2} >= a_m)``.

    ``a_n = n**alpha`` (``mode="slln"``) or ``sqrt(n log n)`` (``"ll"``).
    Terms are evaluated exactly for ``n <= 64`` and on a geometric grid
    beyond; between grid points the sum is replaced by the trapezoidal rule
    in ``log n`` applied to ``n * term(n)``. Diagnostic only: a partial sum
    cannot decide convergence of the infinite series.
    """
    grid = series_grid(int(N))
    out = []
    total = 0.0
    prev = None
    for n in grid:
        a = series_threshold(mode, n, alpha)
        term = top_two_product_tail(dist, n, a)
        if prev is None or n == prev[0] + 1:
            total += term
        else:
            n0, t0 = prev
            total += 0.5 * (math.log(n) - math.log(n0)) * (t0 * n0 + term * n)
        out.append(SeriesPoint(n, a, term, total))
        prev = (n, term)
    return out
