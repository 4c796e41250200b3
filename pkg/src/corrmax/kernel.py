"""Extremal Gram and correlation statistics.

* ``W`` -- largest ``|sum_k X[k, i] X[k, j]|`` over ``i < j``;
* ``L`` -- largest absolute Pearson correlation over ``i < j``;
* ``T`` -- largest ``|sum_k U[k, i] V[k, j]|`` over ordered pairs ``i != j``.

Gram products are computed on ``TILE x TILE`` column tiles. Inside a tile
each entry is accumulated over rows in blocks of ``BLOCK_ROWS`` and the block
partials are combined pairwise, so the summation order is fixed by the
matrix shape alone. Tiles are independent work units and the final argmax
is resolved with a lexicographic tie rule, which makes every result
independent of the number of workers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DegenerateColumn, ShapeError
from .matrix import (
    BLOCK_ROWS,
    DataMatrix,
    as_matrix,
    block_col_sqdev,
    block_col_sums,
    column_stats,
    degenerate_mask,
    pairwise_sum,
)

TILE = 128

# reduce_abs modes
_UPPER, _OFFDIAG = 0, 1


@dataclass(frozen=True)
class MaxEntryResult:
    """An extremal entry and the 0-based column pair attaining it."""

    value: float
    i: int
    j: int
    n_used: int
    p_used: int

    @property
    def pair(self):
        return (self.i, self.j)


@dataclass(frozen=True)
class TrajectoryPoint:
    n: int
    p: int
    W: float
    L: float | None
    W_pair: tuple
    L_pair: tuple | None
    colsum: float


@dataclass(frozen=True)
class PrefixTrajectory:
    points: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, k):
        return self.points[k]


def _ranges(p, tile):
    return [(a, min(a + tile, p)) for a in range(0, p, tile)]


def _run(fn, items, workers):
    workers = _backend.default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _best(records):
    """Largest value; ties go to the lexicographically smallest pair."""
    best = None
    for v, i, j in records:
        if i < 0:
            continue
        if best is None or v > best[0] or (v == best[0] and (i, j) < (best[1], best[2])):
            best = (v, i, j)
    return best


def _gram(be, A, B, rows, cols, r0, r1, sa, sb):
    (i0, i1), (j0, j1) = rows, cols
    parts = []
    for b0 in range(r0, r1, BLOCK_ROWS):
        out = np.empty((i1 - i0, j1 - j0))
        be.gram_tile(A, B, i0, i1, j0, j1, b0, min(b0 + BLOCK_ROWS, r1), sa, sb, out)
        parts.append(out)
    return pairwise_sum(parts)


def _upper_pairs(p, tile):
    rs = _ranges(p, tile)
    return [(a, b) for ia, a in enumerate(rs) for b in rs[ia:]]


def gram_offdiag_max(X, *, workers=None, backend=None, tile=TILE):
    """``W = max_{i<j} |sum_k X[k,i] X[k,j]|`` with its argmax pair."""
    X = as_matrix(X)
    be = _backend.resolve(backend)
    v = X.values
    zero = np.zeros(X.p)

    def work(pair):
        rows, cols = pair
        C = _gram(be, v, v, rows, cols, 0, X.n, zero, zero)
        return be.reduce_abs(C, rows[0], cols[0], _UPPER)

    best = _best(_run(work, _upper_pairs(X.p, tile), workers))
    return MaxEntryResult(best[0], best[1], best[2], X.n, X.p)


def _nondegenerate(X, skip_degenerate, backend):
    means, css, degen = column_stats(X, backend)
    keep = np.arange(X.p)
    if degen.any():
        if not skip_degenerate:
            raise DegenerateColumn(int(np.flatnonzero(degen)[0]))
        keep = np.flatnonzero(~degen)
        if keep.size < 2:
            raise ShapeError(f"only {keep.size} non-degenerate column(s) remain")
    return means, css, keep


def corr_offdiag_max(X, *, skip_degenerate=False, workers=None, backend=None, tile=TILE):
    """``L = max_{i<j} |r_ij|`` (sample Pearson correlation).

    Columns are centered at their blocked means before the Gram pass, which
    keeps the cross products free of the cancellation that the raw identity
    ``sum xy - n mean_x mean_y`` suffers for large means.

    Parameters
    ----------
    skip_degenerate : bool
        If False (default) a zero-variance column raises
        :class:`DegenerateColumn`. If True such columns are excluded; pair
        indices still refer to the original columns.
    """
    X = as_matrix(X)
    be = _backend.resolve(backend)
    means, css, keep = _nondegenerate(X, skip_degenerate, backend)
    v = X.values
    if keep.size != X.p:
        v = np.ascontiguousarray(v[:, keep])
        means, css = means[keep], css[keep]
    p = v.shape[1]
    n = X.n
    zero = np.zeros(p)
    # Diagonal tiles first: their diagonals give the normalizing sums of
    # squares with the same arithmetic as the cross products, so duplicated
    # columns yield exactly 1.
    diag_pairs = [(r, r) for r in _ranges(p, tile)]
    diag_tiles = _run(lambda pr: _gram(be, v, v, pr[0], pr[1], 0, n, means, means), diag_pairs, workers)
    ss = np.concatenate([np.diagonal(C) for C in diag_tiles])
    done = dict(zip(diag_pairs, diag_tiles))

    def work(pair):
        rows, cols = pair
        C = done.get(pair)
        if C is None:
            C = _gram(be, v, v, rows, cols, 0, n, means, means)
        (i0, i1), (j0, j1) = rows, cols
        return be.reduce_corr(C, i0, j0, float(n), zero[i0:i1], zero[j0:j1], ss[i0:i1], ss[j0:j1])

    best = _best(_run(work, _upper_pairs(p, tile), workers))
    return MaxEntryResult(best[0], int(keep[best[1]]), int(keep[best[2]]), X.n, X.p)


def extremal_stats(X, *, workers=None, backend=None, tile=TILE):
    """``(W, L)`` from a single raw Gram pass.

    ``L`` uses ``sum (x - mx)(y - my) = sum xy - n mx my``; prefer
    :func:`corr_offdiag_max` when column means are large compared with
    their spread.
    """
    X = as_matrix(X)
    be = _backend.resolve(backend)
    means, css, keep = _nondegenerate(X, False, backend)
    v = X.values
    zero = np.zeros(X.p)
    n = float(X.n)

    def work(pair):
        rows, cols = pair
        (i0, i1), (j0, j1) = rows, cols
        C = _gram(be, v, v, rows, cols, 0, X.n, zero, zero)
        return (
            be.reduce_abs(C, i0, j0, _UPPER),
            be.reduce_corr(C, i0, j0, n, means[i0:i1], means[j0:j1], css[i0:i1], css[j0:j1]),
        )

    recs = _run(work, _upper_pairs(X.p, tile), workers)
    w = _best(r[0] for r in recs)
    l_ = _best(r[1] for r in recs)
    return (
        MaxEntryResult(w[0], w[1], w[2], X.n, X.p),
        MaxEntryResult(l_[0], l_[1], l_[2], X.n, X.p),
    )


def cross_gram_max(U, V, *, workers=None, backend=None, tile=TILE):
    """``T = max_{i != j} |sum_k U[k,i] V[k,j]|`` over ordered pairs."""
    U, V = as_matrix(U), as_matrix(V)
    if U.shape != V.shape:
        raise ShapeError(f"U is {U.n} x {U.p} but V is {V.n} x {V.p}")
    be = _backend.resolve(backend)
    a, b = U.values, V.values
    zero = np.zeros(U.p)
    rs = _ranges(U.p, tile)

    def work(pair):
        rows, cols = pair
        C = _gram(be, a, b, rows, cols, 0, U.n, zero, zero)
        return be.reduce_abs(C, rows[0], cols[0], _OFFDIAG)

    best = _best(_run(work, [(r, c) for r in rs for c in rs], workers))
    return MaxEntryResult(best[0], best[1], best[2], U.n, U.p)


def pearson(X, i, j, *, backend=None):
    """Sample correlation of columns ``i`` and ``j`` (0-based), clamped to [-1, 1]."""
    X = as_matrix(X)
    for c in (i, j):
        if not 0 <= c < X.p:
            raise IndexError(f"column {c} outside 0..{X.p - 1}")
    means, css, degen = column_stats(X, backend)
    for c in (i, j):
        if degen[c]:
            raise DegenerateColumn(c)
    v = X.values
    prod = np.ascontiguousarray(((v[:, i] - means[i]) * (v[:, j] - means[j]))[:, None])
    cov = block_col_sums(prod, 0, X.n, backend)[0]
    r = cov / math.sqrt(css[i] * css[j])
    return min(1.0, max(-1.0, r))


def oracle_max_naive(X, mode="gram"):
    """Unblocked pure-Python reference for ``W`` (``mode="gram"``) or ``L`` (``"corr"``).

    Only meant for small inputs; it is the ground truth in the tests.
    """
    X = as_matrix(X)
    n, p = X.shape
    rows = X.values.tolist()
    cols = [[rows[k][i] for k in range(n)] for i in range(p)]
    if mode == "gram":
        entry = lambda a, b: abs(sum(x * y for x, y in zip(cols[a], cols[b])))  # noqa: E731
    elif mode == "corr":
        means = [sum(c) / n for c in cols]
        cent = [[x - m for x in c] for c, m in zip(cols, means)]
        ss = [sum(x * x for x in c) for c in cent]
        for idx, (s, m) in enumerate(zip(ss, means)):
            if s <= 1e-12 * n * max(1.0, m * m):
                raise DegenerateColumn(idx)

        def entry(a, b):
            r = sum(x * y for x, y in zip(cent[a], cent[b])) / math.sqrt(ss[a] * ss[b])
            return min(1.0, abs(r))
    else:
        raise ValueError(f"mode must be 'gram' or 'corr', got {mode!r}")
    best = (-1.0, -1, -1)
    for a in range(p):
        for b in range(a + 1, p):
            val = entry(a, b)
            if val > best[0]:
                best = (val, a, b)
    return MaxEntryResult(best[0], best[1], best[2], n, p)


def oracle_cross_naive(U, V):
    """Pure-Python reference for :func:`cross_gram_max`."""
    U, V = as_matrix(U), as_matrix(V)
    if U.shape != V.shape:
        raise ShapeError("U and V must have the same shape")
    n, p = U.shape
    u, w = U.values.tolist(), V.values.tolist()
    best = (-1.0, -1, -1)
    for a in range(p):
        for b in range(p):
            if a == b:
                continue
            val = abs(sum(u[k][a] * w[k][b] for k in range(n)))
            if val > best[0]:
                best = (val, a, b)
    return MaxEntryResult(best[0], best[1], best[2], n, p)


def _schedule_fn(schedule):
    if callable(schedule):
        return schedule
    if isinstance(schedule, int):
        return lambda n: schedule
    raise TypeError("schedule must be callable n -> p or an int")


def prefix_trajectory(
    X,
    schedule,
    checkpoints,
    *,
    compute_corr=True,
    skip_degenerate=False,
    workers=None,
    backend=None,
    tile=TILE,
):
    """``W`` and ``L`` of the leading ``n x schedule(n)`` block at each checkpoint.

    Rows are appended incrementally: the Gram matrix of the widest block
    needed, the column means and centered sums of squares (merged with
    Chan's pairwise update) are carried from one checkpoint to the next, so
    the total cost is one Gram pass over ``max(n) x max(p)``.

    ``L`` uses the raw identity ``G_ij - n mean_i mean_j``. Each point also
    carries ``colsum = max_i |sum_k X[k, i]|`` over the active columns.
    """
    X = as_matrix(X)
    be = _backend.resolve(backend)
    sched = _schedule_fn(schedule)
    cps = [int(c) for c in checkpoints]
    if not cps:
        raise ValueError("no checkpoints")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if cps[0] < 2 or cps[-1] > X.n:
        raise ShapeError(f"checkpoints must lie in [2, {X.n}]")
    ps = [int(sched(n)) for n in cps]
    for n, p in zip(cps, ps):
        if not 2 <= p <= X.p:
            raise ShapeError(f"schedule gives p={p} at n={n}; matrix has {X.p} columns")

    P = max(ps)
    v = np.ascontiguousarray(X.values[:, :P])
    G = np.zeros((P, P))
    total = np.zeros(P)
    mean = np.zeros(P)
    m2 = np.zeros(P)
    zero = np.zeros(P)
    pairs = _upper_pairs(P, tile)
    points = []
    n_prev = 0
    for n, p in zip(cps, ps):
        seg = n - n_prev

        def accumulate(pair, r0=n_prev, r1=n):
            rows, cols = pair
            (i0, i1), (j0, j1) = rows, cols
            G[i0:i1, j0:j1] += _gram(be, v, v, rows, cols, r0, r1, zero, zero)

        _run(accumulate, pairs, workers)
        seg_sum = block_col_sums(v, n_prev, n, be)
        seg_mean = seg_sum / seg
        seg_m2 = block_col_sqdev(v, n_prev, n, seg_mean, be)
        delta = seg_mean - mean
        m2 = m2 + seg_m2 + delta * delta * (n_prev * seg / n)
        mean = mean + delta * (seg / n)
        total = total + seg_sum
        n_prev = n

        active = _upper_pairs(p, tile)
        w_recs = _run(lambda pr: be.reduce_abs(G[pr[0][0]:pr[0][1], pr[1][0]:pr[1][1]], pr[0][0], pr[1][0], _UPPER), active, workers)
        w = _best(w_recs)
        colsum = float(np.max(np.abs(total[:p])))
        L = L_pair = None
        if compute_corr:
            L, L_pair = _trajectory_corr(be, G, mean[:p], m2[:p], n, p, skip_degenerate, active, workers)
        points.append(TrajectoryPoint(n, p, w[0], L, (w[1], w[2]), L_pair, colsum))
    return PrefixTrajectory(points)


def _trajectory_corr(be, G, mean, m2, n, p, skip_degenerate, active, workers):
    degen = degenerate_mask(mean, m2, n)
    nf = float(n)
    if not degen.any():
        mean = np.ascontiguousarray(mean)
        m2 = np.ascontiguousarray(m2)

        def work(pr):
            (i0, i1), (j0, j1) = pr
            return be.reduce_corr(G[i0:i1, j0:j1], i0, j0, nf, mean[i0:i1], mean[j0:j1], m2[i0:i1], m2[j0:j1])

        best = _best(_run(work, active, workers))
        return best[0], (best[1], best[2])
    if not skip_degenerate:
        raise DegenerateColumn(int(np.flatnonzero(degen)[0]))
    keep = np.flatnonzero(~degen)
    if keep.size < 2:
        raise ShapeError(f"only {keep.size} non-degenerate column(s) remain at n={n}")
    upper = np.triu(G[:p, :p])
    sym = upper + np.triu(upper, 1).T
    sub = np.ascontiguousarray(sym[np.ix_(keep, keep)])
    mk = np.ascontiguousarray(mean[keep])
    sk = np.ascontiguousarray(m2[keep])
    v, i, j = be.reduce_corr(sub, 0, 0, nf, mk, mk, sk, sk)
    return v, (int(keep[i]), int(keep[j]))
