"""Seeded Monte Carlo experiments for the almost-sure and distributional limits.

Each seed indexes one infinite i.i.d. array (see :mod:`corrmax.rng`); the
matrix at checkpoint ``n`` is the leading ``n x p_n`` block of that array, so a
trajectory follows a single realization as ``n`` grows. Every experiment is a
pure function of its configuration and seeds.
"""

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend, rng
from .asymptotics import jiang_transform, limit_cdf
from .distributions import DistributionSpec
from .errors import DegenerateColumn, DomainError
from .kernel import corr_offdiag_max, prefix_trajectory
from .matrix import DataMatrix

CSV_COLUMNS = ("seed", "n", "p", "w_slln", "l_slln", "w_ll", "l_ll", "colsum_ll", "t_stat")
NORMALIZED = ("w_slln", "l_slln", "w_ll", "l_ll", "colsum_ll", "t_stat")
DEFAULT_CHECKPOINTS = (250, 500, 1000, 2000)
PATTERNS = ("decade", "decade_inv", "octave", "octave_inv")


class PnSchedule:
    """Dimension ``p_n`` as a function of the sample size ``n``.

    Build with :meth:`proportional`, :meth:`ratio_band` or :meth:`fixed`, or
    parse ``"proportional:1"``, ``"ratio_band:0.5,2"``, ``"fixed:100"``.

    ``ratio_band(c_lo, c_hi, pattern)`` alternates ``n / p_n`` between the two
    ends of the band: ``pattern="decade"`` switches on the parity of
    ``floor(log10 n)``, ``"octave"`` on that of ``floor(log2 n)``; even levels
    use ``c_lo``. The ``_inv`` variants swap the phase. The ratio therefore
    has no limit while staying inside ``[c_lo, c_hi]``.
    """

    def __init__(self, kind, params=(), pattern=None):
        params = tuple(float(x) for x in params)
        if kind == "proportional":
            if len(params) != 1 or not (params[0] > 0 and math.isfinite(params[0])):
                raise DomainError("proportional schedule needs one gamma > 0")
        elif kind == "ratio_band":
            if len(params) != 2 or not (0 < params[0] <= params[1] < math.inf):
                raise DomainError("ratio_band needs 0 < c_lo <= c_hi < inf")
            pattern = pattern or "decade"
            if pattern not in PATTERNS:
                raise DomainError(f"unknown ratio_band pattern {pattern!r}; known: {', '.join(PATTERNS)}")
        elif kind == "fixed":
            if len(params) != 1 or params[0] < 2 or not float(params[0]).is_integer():
                raise DomainError("fixed schedule needs an integer p >= 2")
        else:
            raise DomainError(f"unknown schedule kind {kind!r}")
        self.kind = kind
        self.params = params
        self.pattern = pattern if kind == "ratio_band" else None

    @classmethod
    def proportional(cls, gamma):
        return cls("proportional", (gamma,))

    @classmethod
    def ratio_band(cls, c_lo, c_hi, pattern="decade"):
        return cls("ratio_band", (c_lo, c_hi), pattern)

    @classmethod
    def fixed(cls, p):
        return cls("fixed", (p,))

    @classmethod
    def parse(cls, text):
        name, _, rest = text.strip().partition(":")
        parts = [s.strip() for s in rest.split(",") if s.strip()]
        pattern = None
        if name == "ratio_band" and len(parts) == 3:
            pattern = parts.pop()
        try:
            params = tuple(float(s) for s in parts)
        except ValueError:
            raise DomainError(f"bad schedule {text!r}") from None
        return cls(name, params, pattern)

    def _target_ratio(self, n):
        if self.kind == "proportional":
            return self.params[0]
        base = 10.0 if self.pattern.startswith("decade") else 2.0
        level = math.floor(math.log(n, base) + 1e-12)
        low = (level % 2 == 0) != self.pattern.endswith("_inv")
        return self.params[0] if low else self.params[1]

    def __call__(self, n):
        if n < 2:
            raise DomainError(f"n must be >= 2, got {n}")
        if self.kind == "fixed":
            return int(self.params[0])
        p = max(2, round(n / self._target_ratio(n)))
        if self.kind == "ratio_band":
            lo, hi = self.params
            while p > 2 and n / p < lo:
                p -= 1
            while n / p > hi:
                p += 1
        return int(p)

    def band(self):
        """``(c_lo, c_hi)`` declared for ``n / p_n``; ``None`` for ``fixed``."""
        if self.kind == "ratio_band":
            return self.params
        if self.kind == "proportional":
            return (self.params[0], self.params[0])
        return None

    def check(self, ns):
        """Raise :class:`DomainError` unless every ``(n, p_n)`` honours the band.

        For ``proportional`` the band is ``gamma`` up to rounding of ``p_n``.
        """
        for n in ns:
            p = self(n)
            if self.kind == "proportional":
                if p > 2 and abs(p - n / self.params[0]) > 0.5 + 1e-9:
                    raise DomainError(f"p_n={p} at n={n} is not round(n/gamma)")
            elif self.kind == "ratio_band":
                lo, hi = self.params
                if not lo - 1e-12 <= n / p <= hi + 1e-12:
                    raise DomainError(f"n/p_n = {n / p:g} at n={n} leaves [{lo:g}, {hi:g}]")

    def __str__(self):
        body = ",".join(_fmt(x) for x in self.params)
        if self.pattern and self.pattern != "decade":
            body += f",{self.pattern}"
        return f"{self.kind}:{body}"

    def __repr__(self):
        return f"PnSchedule({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, PnSchedule) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    def to_dict(self):
        d = {"kind": self.kind, "params": list(self.params)}
        if self.pattern:
            d["pattern"] = self.pattern
        return d


@dataclass(frozen=True)
class CheckpointRecord:
    """Raw and normalized statistics at one checkpoint; ``None`` where undefined."""

    n: int
    p: int
    W: float
    L: float | None
    W_pair: tuple
    L_pair: tuple | None
    colsum: float
    w_slln: float | None
    l_slln: float | None
    w_ll: float
    l_ll: float | None
    colsum_ll: float
    t_stat: float | None

    def to_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "W": self.W,
            "W_pair": _one_based(self.W_pair),
            "L": self.L,
            "L_pair": _one_based(self.L_pair),
            "colsum": self.colsum,
            "w_slln": self.w_slln,
            "l_slln": self.l_slln,
            "w_ll": self.w_ll,
            "l_ll": self.l_ll,
            "colsum_ll": self.colsum_ll,
            "t_stat": self.t_stat,
        }


@dataclass(frozen=True)
class ExperimentRecord:
    """One seed's trajectory through the checkpoints."""

    experiment: str
    seed: int
    dist: DistributionSpec
    schedule: PnSchedule
    checkpoints: tuple
    alpha: float | None
    points: tuple = field(default_factory=tuple)

    def point(self, n):
        for pt in self.points:
            if pt.n == n:
                return pt
        raise KeyError(n)

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "dist": str(self.dist),
            "schedule": str(self.schedule),
            "checkpoints": list(self.checkpoints),
            "alpha": self.alpha,
            "points": [pt.to_dict() for pt in self.points],
        }


@dataclass(frozen=True)
class EvdRecord:
    """Replicated ``t`` statistics and their KS distance to the limit law."""

    dist: DistributionSpec
    n: int
    p: int
    gamma: float
    seeds: tuple
    L_samples: tuple
    t_samples: tuple
    ks: float

    def to_dict(self):
        return {
            "experiment": "evd",
            "dist": str(self.dist),
            "n": self.n,
            "p": self.p,
            "gamma": self.gamma,
            "replicates": len(self.t_samples),
            "ks": self.ks,
            "seeds": list(self.seeds),
            "L_samples": list(self.L_samples),
            "t_samples": list(self.t_samples),
        }


@dataclass(frozen=True)
class ProbeRecord:
    seed: int
    n_min: int
    n_max: int
    l_ll_min: float
    l_ll_max: float
    growth_ratio: float

    def to_dict(self):
        return dict(self.__dict__)


def _fmt(x):
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def _one_based(pair):
    return None if pair is None else [pair[0] + 1, pair[1] + 1]


def seed_list(seeds, root=0):
    """Normalize ``seeds``: an int ``m`` means ``m`` seeds derived from ``root``."""
    if isinstance(seeds, (int, np.integer)):
        if seeds < 1:
            raise DomainError(f"need at least one seed, got {seeds}")
        return [rng.derive_seed(root, k) for k in range(int(seeds))]
    out = [int(s) for s in seeds]
    if not out:
        raise DomainError("empty seed list")
    return out


def _checkpoints(checkpoints):
    cps = tuple(int(n) for n in checkpoints)
    if not cps:
        raise DomainError("no checkpoints")
    if cps[0] < 2 or any(b <= a for a, b in zip(cps, cps[1:])):
        raise DomainError("checkpoints must be strictly increasing integers >= 2")
    return cps


def _map(fn, items, workers):
    workers = _backend.default_workers() if workers is None else int(workers)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def sample_matrix(dist, n, p, seed, *, backend=None):
    """``n x p`` i.i.d. draws from ``dist``; entry ``(k, i)`` depends only on ``(seed, k, i)``."""
    if n < 2 or p < 2:
        raise DomainError(f"need n, p >= 2, got {n} x {p}")
    return DataMatrix._trusted(dist.draw(seed, (0, int(n)), int(p), backend=backend))


def _trajectory(experiment, dist, schedule, alpha, cps, seed, compute_corr, workers, backend):
    schedule.check(cps)
    ps = [schedule(n) for n in cps]
    X = sample_matrix(dist, cps[-1], max(ps), seed, backend=backend)
    traj = prefix_trajectory(X, schedule, cps, compute_corr=compute_corr, workers=workers, backend=backend)
    points = []
    for tp in traj:
        n = tp.n
        ll_norm = math.sqrt(n * math.log(n))
        L = tp.L
        points.append(
            CheckpointRecord(
                n=n,
                p=tp.p,
                W=tp.W,
                L=L,
                W_pair=tp.W_pair,
                L_pair=tp.L_pair,
                colsum=tp.colsum,
                w_slln=None if alpha is None else tp.W / n**alpha,
                l_slln=None if alpha is None or L is None else n ** (1.0 - alpha) * L,
                w_ll=tp.W / ll_norm,
                l_ll=None if L is None else math.sqrt(n / math.log(n)) * L,
                colsum_ll=tp.colsum / ll_norm,
                t_stat=None if L is None else jiang_transform(L, n),
            )
        )
    return ExperimentRecord(experiment, seed, dist, schedule, cps, alpha, tuple(points))


def run_slln_experiment(dist, schedule, alpha, checkpoints, seeds, *, root=0, workers=None, backend=None):
    """Power-normalized trajectories ``W_n / n**alpha`` and ``n**(1-alpha) L_n``.

    The correlation path is taken only when ``alpha <= 1`` and ``dist`` is
    nondegenerate; otherwise ``l_slln`` is ``None``.
    """
    if not alpha > 0.5:
        raise DomainError(f"alpha must exceed 1/2, got {alpha}")
    cps = _checkpoints(checkpoints)
    corr = alpha <= 1.0 and not dist.is_degenerate
    return [
        _trajectory("slln", dist, schedule, float(alpha), cps, s, corr, workers, backend)
        for s in seed_list(seeds, root)
    ]


def run_ll_experiment(dist, schedule, checkpoints, seeds, *, alpha=None, root=0, workers=None, backend=None):
    """Logarithmic-law trajectories of ``w_ll``, ``l_ll`` and ``colsum_ll``.

    The ``W_n`` law presumes a standardized ``dist``; the ``L_n`` law needs a
    nondegenerate one, so a point mass raises :class:`DegenerateColumn`.
    """
    cps = _checkpoints(checkpoints)
    if dist.is_degenerate:
        raise DegenerateColumn(0, f"{dist} is degenerate: every column is constant")
    return [
        _trajectory("ll", dist, schedule, alpha, cps, s, True, workers, backend)
        for s in seed_list(seeds, root)
    ]


def ks_distance(samples, gamma):
    """Kolmogorov distance between the ECDF of ``samples`` and ``F_gamma``."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    m = x.size
    if m == 0:
        raise DomainError("ks_distance needs at least one sample")
    F = np.array([limit_cdf(float(t), gamma) for t in x])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))


def run_evd_experiment(dist, n, p, replicates, seeds=0, *, workers=None, backend=None):
    """``replicates`` independent ``n x p`` samples; their ``t`` statistics and KS distance.

    ``seeds`` is a root seed (replicate ``r`` uses ``derive_seed(root, r)``)
    or an explicit sequence with one seed per replicate.
    """
    if replicates < 100:
        raise DomainError(f"replicates must be >= 100, got {replicates}")
    if dist.is_degenerate:
        raise DegenerateColumn(0, f"{dist} is degenerate: every column is constant")
    if isinstance(seeds, (int, np.integer)):
        seeds = [rng.derive_seed(int(seeds), r) for r in range(replicates)]
    else:
        seeds = [int(s) for s in seeds]
        if len(seeds) != replicates:
            raise DomainError(f"{len(seeds)} seeds for {replicates} replicates")

    def one(seed):
        X = sample_matrix(dist, n, p, seed, backend=backend)
        return corr_offdiag_max(X, workers=1, backend=backend).value

    Ls = _map(one, seeds, workers)
    ts = [jiang_transform(L, n) for L in Ls]
    gamma = n / p
    return EvdRecord(dist, int(n), int(p), gamma, tuple(seeds), tuple(Ls), tuple(ts), ks_distance(ts, gamma))


def divergence_probe(dist, schedule, checkpoints, seeds, *, root=0, workers=None, backend=None):
    """Per seed, ``l_ll`` at the last checkpoint divided by ``l_ll`` at the first."""
    recs = run_ll_experiment(dist, schedule, checkpoints, seeds, root=root, workers=workers, backend=backend)
    out = []
    for r in recs:
        a, b = r.points[0], r.points[-1]
        out.append(ProbeRecord(r.seed, a.n, b.n, a.l_ll, b.l_ll, b.l_ll / a.l_ll))
    return out


def summarize(records, fields=NORMALIZED):
    """Median of each normalized field at each checkpoint, across seeds."""
    by_n = {}
    for r in records:
        for pt in r.points:
            by_n.setdefault(pt.n, []).append(pt)
    out = {}
    for n in sorted(by_n):
        row = {"n": n, "p": by_n[n][0].p, "seeds": len(by_n[n])}
        for f in fields:
            vals = sorted(getattr(pt, f) for pt in by_n[n] if getattr(pt, f) is not None)
            row[f] = float(np.median(vals)) if vals else None
        out[str(n)] = row
    return out


def dumps(obj):
    """Compact, key-order-preserving JSON; floats use the shortest round-trip form."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def write_jsonl(records, fh):
    for r in records:
        fh.write(dumps(r.to_dict()))
        fh.write("\n")


def read_jsonl(fh):
    return [json.loads(line) for line in fh if line.strip()]


def write_csv(records, fh):
    """One row per (seed, checkpoint) with the columns of :data:`CSV_COLUMNS`."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        for pt in r.points:
            row = [r.seed, pt.n, pt.p] + [getattr(pt, f) for f in NORMALIZED]
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])


def records_to_csv(records):
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
