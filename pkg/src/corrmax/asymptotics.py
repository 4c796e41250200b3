"""Type-I extreme-value limit for the largest sample correlation.

Under independence, with ``n / p -> gamma``,

    P(n L**2 - 4 log n + log log n <= t)  ->  exp(-exp(-t / 2) / (gamma**2 sqrt(8 pi)))

This module provides the transform, the limit CDF and its inverse, upper-tail
p-values, and the resulting test of ``H0: R = I``. Logarithms are natural.
"""

import math
from dataclasses import asdict, dataclass

from .errors import DomainError
from .kernel import corr_offdiag_max
from .matrix import as_matrix

_LOG_SQRT_8PI = 0.5 * math.log(8.0 * math.pi)


@dataclass(frozen=True)
class TestReport:
    n: int
    p: int
    gamma_hat: float
    L: float
    t_stat: float
    p_value: float
    level: float
    reject: bool
    argmax_pair: tuple

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self, one_based=True):
        d = asdict(self)
        i, j = self.argmax_pair
        d["argmax_pair"] = [i + 1, j + 1] if one_based else [i, j]
        return d


def _check_gamma(gamma):
    if not (gamma > 0 and math.isfinite(gamma)):
        raise DomainError(f"gamma must be a positive finite number, got {gamma}")


def jiang_transform(L, n):
    """``n L**2 - 4 log n + log log n``."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if L < 0:
        raise DomainError(f"L must be >= 0, got {L}")
    return n * L * L - 4.0 * math.log(n) + math.log(math.log(n))


def _log_rate(t, gamma):
    # log of exp(-t/2) / (gamma^2 sqrt(8 pi))
    return -0.5 * t - 2.0 * math.log(gamma) - _LOG_SQRT_8PI


def limit_cdf(t, gamma):
    """Limit CDF ``F_gamma(t)``."""
    _check_gamma(gamma)
    lr = _log_rate(t, gamma)
    if lr > 700.0:
        return 0.0
    return math.exp(-math.exp(lr))


def limit_sf(t, gamma):
    """``1 - F_gamma(t)`` without cancellation in the upper tail."""
    _check_gamma(gamma)
    lr = _log_rate(t, gamma)
    if lr > 700.0:
        return 1.0
    return -math.expm1(-math.exp(lr))


def limit_quantile(q, gamma):
    """Inverse of :func:`limit_cdf`: ``-2 log(-gamma**2 sqrt(8 pi) log q)``."""
    _check_gamma(gamma)
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return -2.0 * (math.log(-math.log(q)) + 2.0 * math.log(gamma) + _LOG_SQRT_8PI)


def p_value(L, n, gamma):
    """Upper-tail p-value of ``L`` under the limit law."""
    return limit_sf(jiang_transform(L, n), gamma)


def run_test(X, level=0.05, *, workers=None, backend=None):
    """Test ``H0: R = I`` on data ``X`` with ``gamma`` estimated as ``n / p``.

    Rejects when the upper-tail p-value falls below ``level``.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    X = as_matrix(X)
    res = corr_offdiag_max(X, workers=workers, backend=backend)
    gamma = X.n / X.p
    t = jiang_transform(res.value, X.n)
    pv = limit_sf(t, gamma)
    return TestReport(
        n=X.n,
        p=X.p,
        gamma_hat=gamma,
        L=res.value,
        t_stat=t,
        p_value=pv,
        level=level,
        reject=pv < level,
        argmax_pair=(res.i, res.j),
    )
