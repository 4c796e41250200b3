"""Counter-based random numbers.

Every draw is a pure function of ``(seed, stream, row, column)``: the value
is SplitMix64 evaluated at counter ``row * 2**32 + column`` of a key derived
from ``(seed, stream)``. Because no state is carried between draws, the
``n x p`` array for a larger ``(n, p)`` extends the smaller one entrywise,
and any sub-block can be generated independently of the rest.

Derivation scheme (kept stable; changing it changes every experiment)::

    key(seed, stream) = mix64(mix64(seed + GOLDEN) ^ (stream * STREAM_MUL))
    bits(k, i)        = mix64(key + (k * 2**32 + i + 1) * GOLDEN)
    uniform(k, i)     = ((bits >> 11) + 0.5) * 2**-53        # open (0, 1)

where ``mix64`` is the SplitMix64 finalizer.
"""

import numpy as np

from . import _backend

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STREAM_MUL = 0xD1B54A32D192ED03
MAX_INDEX = 1 << 32


def mix64(z):
    """SplitMix64 output function on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed, stream=0):
    """Key for one ``(seed, stream)`` pair; seeds may be any Python int."""
    base = mix64((int(seed) + GOLDEN) & MASK64)
    return mix64(base ^ ((int(stream) * STREAM_MUL) & MASK64))


def derive_seed(root, index):
    """Child seed for task ``index`` of a run rooted at ``root``."""
    return mix64(stream_key(root, 0x5EED) + (int(index) + 1) * GOLDEN)


def uniform_block(seed, rows, p, stream=0, col_start=0, backend=None):
    """Uniforms on ``(0, 1)`` for rows ``range(*rows)`` and ``p`` columns.

    Returns a C-contiguous ``(len(rows), p)`` float64 array whose entry
    ``[r, c]`` is the draw for global index ``(rows[0] + r, col_start + c)``.
    """
    r0, r1 = rows
    if r0 < 0 or r1 > MAX_INDEX or col_start < 0 or col_start + p > MAX_INDEX:
        raise ValueError("row/column index outside the 32-bit counter range")
    bits = bits_block(seed, rows, p, stream, col_start, backend)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def bits_block(seed, rows, p, stream=0, col_start=0, backend=None):
    """Raw 64-bit outputs for the same index layout as :func:`uniform_block`."""
    be = _backend.resolve(backend)
    r0, r1 = rows
    out = np.empty((max(r1 - r0, 0), p), dtype=np.uint64)
    if out.size:
        be.hash_block(stream_key(seed, stream), r0, col_start, out)
    return out
