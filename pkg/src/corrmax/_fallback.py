"""Pure-numpy kernels with the same signatures as the compiled core.

Gram tiles go through BLAS, so values agree with the compiled backend only
to rounding; hashing and column statistics are bit-identical.
"""

import numpy as np

NAME = "python"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash_block(key, r0, c0, out):
    rows, cols = out.shape
    k = np.arange(r0, r0 + rows, dtype=np.uint64)[:, None] << np.uint64(32)
    ctr = k + np.arange(c0 + 1, c0 + 1 + cols, dtype=np.uint64)[None, :]
    out[...] = _mix64(np.uint64(key) + ctr * _GOLDEN)


def _neumaier(rows):
    s = None
    comp = None
    for x in rows:
        if s is None:
            s = np.zeros_like(x)
            comp = np.zeros_like(x)
        t = s + x
        comp += np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
        s = t
    return s + comp


def col_sum(X, r0, r1, out):
    if r1 <= r0:
        out[...] = 0.0
        return
    out[...] = _neumaier(X[k] for k in range(r0, r1))


def col_sqdev(X, r0, r1, center, out):
    if r1 <= r0:
        out[...] = 0.0
        return

    def sq(k):
        d = X[k] - center
        return d * d

    out[...] = _neumaier(sq(k) for k in range(r0, r1))


def gram_tile(A, B, i0, i1, j0, j1, r0, r1, sa, sb, out):
    if r1 <= r0:
        out[...] = 0.0
        return
    a = A[r0:r1, i0:i1] - sa[i0:i1]
    b = B[r0:r1, j0:j1] - sb[j0:j1]
    np.matmul(a.T, b, out=out)


def reduce_abs(C, i0, j0, mode):
    rows, cols = C.shape
    if rows == 0 or cols == 0:
        return -1.0, -1, -1
    v = np.abs(C)
    gi = np.arange(i0, i0 + rows)[:, None]
    gj = np.arange(j0, j0 + cols)[None, :]
    if mode == 0:
        v = np.where(gi < gj, v, -1.0)
    elif mode == 1:
        v = np.where(gi != gj, v, -1.0)
    return _first_max(v, i0, j0)


def reduce_corr(C, i0, j0, n, di, dj, si, sj):
    rows, cols = C.shape
    if rows == 0 or cols == 0:
        return -1.0, -1, -1
    r = (C - (n * di)[:, None] * dj[None, :]) / np.sqrt(si[:, None] * sj[None, :])
    v = np.minimum(np.abs(r), 1.0)
    gi = np.arange(i0, i0 + rows)[:, None]
    gj = np.arange(j0, j0 + cols)[None, :]
    v = np.where(gi < gj, v, -1.0)
    return _first_max(v, i0, j0)


def _first_max(v, i0, j0):
    # argmax returns the first occurrence in C order: smallest (i, j) on ties
    flat = int(np.argmax(v))
    i, j = divmod(flat, v.shape[1])
    best = float(v[i, j])
    if best < 0.0:
        return -1.0, -1, -1
    return best, i0 + i, j0 + j
