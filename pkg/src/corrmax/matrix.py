"""Data matrices: validation, file I/O and per-column summaries.

Rows are observations and columns are variables, so ``X[k, i]`` is the
``k``-th observation of variable ``i`` (0-based throughout the Python API).
"""

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .errors import FormatError, ParseError, ShapeError

#: Rows per accumulation block. Block partials are combined pairwise, so the
#: summation order depends only on the row count, never on the worker count.
BLOCK_ROWS = 4096

#: Relative threshold below which a column's centered sum of squares counts
#: as zero.
EPS_DEGENERATE = 1e-12

MAGIC = b"CMX1"
_HEADER = struct.Struct("<4sQQ")

_NUMBER = re.compile(
    r"[+-]?(?:(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?|nan|inf(?:inity)?)\Z",
    re.IGNORECASE,
)


class DataMatrix:
    """An immutable ``n x p`` float64 matrix with finite entries.

    Parameters
    ----------
    values : array_like
        Two-dimensional real data. It is copied into a read-only,
        C-contiguous float64 array.

    Raises
    ------
    ShapeError
        If the input is not 2-D or has fewer than two rows or columns.
    ValueError
        If any entry is NaN or infinite.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got {arr.ndim}-D")
        n, p = arr.shape
        if n < 2 or p < 2:
            raise ShapeError(f"need n >= 2 and p >= 2, got {n} x {p}")
        if not np.isfinite(arr).all():
            raise ValueError("matrix contains NaN or infinite entries")
        arr.flags.writeable = False
        self._values = arr

    @classmethod
    def _trusted(cls, arr):
        # internal constructor for arrays already known to be valid
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        obj._values = arr
        return obj

    @property
    def values(self):
        return self._values

    @property
    def n(self):
        return self._values.shape[0]

    @property
    def p(self):
        return self._values.shape[1]

    @property
    def shape(self):
        return self._values.shape

    def leading(self, n, p):
        """The leading ``n x p`` submatrix."""
        if not (2 <= n <= self.n and 2 <= p <= self.p):
            raise ShapeError(f"leading block {n} x {p} outside {self.n} x {self.p}")
        return DataMatrix._trusted(self._values[:n, :p])

    def __array__(self, dtype=None, copy=None):
        if dtype is not None and dtype != self._values.dtype:
            return self._values.astype(dtype)
        return self._values

    def __eq__(self, other):
        if not isinstance(other, DataMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash((self.shape, self._values.tobytes()))

    def __repr__(self):
        return f"DataMatrix(n={self.n}, p={self.p})"


def as_matrix(X):
    """Coerce ``X`` to :class:`DataMatrix` (no copy if it already is one)."""
    return X if isinstance(X, DataMatrix) else DataMatrix(X)


@dataclass(frozen=True)
class ColumnSummary:
    mean: float
    css: float
    degenerate: bool


def load_csv(path, has_header=False):
    """Read a comma-separated numeric matrix.

    Lines may end in ``\\n`` or ``\\r\\n``; blank lines are ignored. Numbers
    use ``.`` as the decimal separator with an optional exponent.

    Raises
    ------
    ParseError
        On ragged rows or non-numeric fields; ``err.row`` is the 1-based
        line number.
    ShapeError
        If fewer than two data rows or columns remain.
    ValueError
        On NaN or infinite values.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    rows = []
    width = None
    header_pending = has_header
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip():
            continue
        if header_pending:
            header_pending = False
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(
                f"{path}: line {lineno} has {len(fields)} fields, expected {width}",
                row=lineno,
            )
        parsed = []
        for field in fields:
            tok = field.strip()
            if not _NUMBER.match(tok):
                raise ParseError(f"{path}: line {lineno}: not a number: {tok!r}", row=lineno)
            parsed.append(float(tok))
        rows.append(parsed)
    if len(rows) < 2 or (width or 0) < 2:
        raise ShapeError(f"{path}: need at least 2 rows and 2 columns, got {len(rows)} x {width or 0}")
    arr = np.array(rows, dtype=np.float64)
    if not np.isfinite(arr).all():
        k, i = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"{path}: non-finite value at data row {k + 1}, column {i + 1}")
    return DataMatrix._trusted(arr)


def save_csv(X, path):
    """Write ``X`` as CSV using shortest round-trip float formatting."""
    X = as_matrix(X)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        for row in X.values:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def save_binary(X, path):
    """Write ``X`` in the ``CMX1`` format (little-endian header + row-major f8)."""
    X = as_matrix(X)
    with Path(path).open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, X.n, X.p))
        fh.write(X.values.astype("<f8", copy=False).tobytes(order="C"))


def load_binary(path):
    """Read a ``CMX1`` file written by :func:`save_binary` (bit-exact)."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: {len(data)} bytes is too short for a CMX1 header")
    magic, n, p = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    payload = len(data) - _HEADER.size
    if payload != n * p * 8:
        raise FormatError(
            f"{path}: header declares {n} x {p} ({n * p * 8} bytes) but payload has {payload} bytes"
        )
    if n < 2 or p < 2:
        raise ShapeError(f"{path}: need n >= 2 and p >= 2, got {n} x {p}")
    arr = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(n, p)
    arr = arr.astype(np.float64)
    if not np.isfinite(arr).all():
        raise ValueError(f"{path}: matrix contains NaN or infinite entries")
    return DataMatrix._trusted(arr)


def load_matrix(path, has_header=False):
    """Dispatch on content: ``CMX1`` magic means binary, anything else CSV."""
    with Path(path).open("rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return load_binary(path)
    return load_csv(path, has_header=has_header)


def pairwise_sum(parts):
    """Combine partial results as a balanced binary tree, left to right."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to sum")
    while len(parts) > 1:
        merged = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def _blocks(r0, r1, size=BLOCK_ROWS):
    return [(b, min(b + size, r1)) for b in range(r0, r1, size)]


def block_col_sums(values, r0, r1, backend=None):
    """Compensated column sums over rows ``[r0, r1)``, blocked and combined pairwise."""
    be = _backend.resolve(backend)
    p = values.shape[1]
    parts = []
    for b0, b1 in _blocks(r0, r1):
        out = np.empty(p)
        be.col_sum(values, b0, b1, out)
        parts.append(out)
    return pairwise_sum(parts) if parts else np.zeros(p)


def block_col_sqdev(values, r0, r1, center, backend=None):
    """Compensated ``sum_k (X[k, i] - center[i])**2`` over rows ``[r0, r1)``."""
    be = _backend.resolve(backend)
    p = values.shape[1]
    center = np.ascontiguousarray(center, dtype=np.float64)
    parts = []
    for b0, b1 in _blocks(r0, r1):
        out = np.empty(p)
        be.col_sqdev(values, b0, b1, center, out)
        parts.append(out)
    return pairwise_sum(parts) if parts else np.zeros(p)


def degenerate_mask(means, css, n):
    return css <= EPS_DEGENERATE * n * np.maximum(1.0, means * means)


def column_stats(X, backend=None):
    """Vectorized ``(means, css, degenerate)`` arrays for every column."""
    X = as_matrix(X)
    v = X.values
    means = block_col_sums(v, 0, X.n, backend) / X.n
    css = block_col_sqdev(v, 0, X.n, means, backend)
    return means, css, degenerate_mask(means, css, X.n)


def column_summaries(X, backend=None):
    """Per-column mean, centered sum of squares and degeneracy flag."""
    means, css, degen = column_stats(X, backend)
    return [
        ColumnSummary(float(m), float(c), bool(d)) for m, c, d in zip(means, css, degen)
    ]
