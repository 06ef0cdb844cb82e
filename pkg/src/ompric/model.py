"""Signals, supports, correlation profiles and the matrix text format.

Indices are 0-based throughout. The text format is::

    rows cols
    a11 a12 ... a1c
    ...

with one whitespace-separated row per line. Numbers are written with
``repr(float)``, the shortest decimal that parses back to the same double.
Vectors are stored as single-column matrices (``n 1``); a single row
(``1 n``) is also accepted on load.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .numerics import as_matrix, as_vector


class DimensionError(ValueError):
    """Operand shapes do not agree."""


class MatrixFormatError(ValueError):
    """A matrix file does not parse; carries 1-based line and column."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class InconsistentRowsError(MatrixFormatError):
    """A data row has the wrong number of entries."""


def make_support(indices, n=None):
    """Normalize ``indices`` to a sorted tuple of distinct ints, bounds-checked against ``n``."""
    out = tuple(sorted({int(i) for i in indices}))
    if out and out[0] < 0:
        raise ValueError(f"negative index in support: {out[0]}")
    if n is not None and out and out[-1] >= n:
        raise ValueError(f"support index {out[-1]} out of range for n={n}")
    return out


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """A dense length-n vector plus the exact set of its nonzero positions."""

    entries: np.ndarray
    support: tuple = field(init=False)

    def __post_init__(self):
        arr = as_vector(self.entries, "signal").copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "support", tuple(int(i) for i in np.flatnonzero(arr)))

    @classmethod
    def from_support(cls, n, support, values):
        x = np.zeros(n)
        x[list(support)] = values
        return cls(x)

    @property
    def length(self):
        return self.entries.shape[0]

    @property
    def sparsity(self):
        return len(self.support)

    def norm1(self):
        return float(np.sum(np.abs(self.entries)))

    def norm2(self):
        return float(np.linalg.norm(self.entries))


@dataclass(frozen=True, eq=False)
class CorrelationProfile:
    """Column correlations ``values[i] = <A e_i, v>`` and their maximum over a support."""

    values: np.ndarray
    support: tuple
    s0: float
    s0_argmax: tuple


def apply(a, x):
    """Return ``y = A x``."""
    a = as_matrix(a)
    x = as_vector(x.entries if isinstance(x, SparseSignal) else x, "x")
    if x.shape[0] != a.shape[1]:
        raise DimensionError(f"x has length {x.shape[0]}, matrix has {a.shape[1]} columns")
    return a @ x


def correlations(a, v, support=()):
    a = as_matrix(a)
    v = as_vector(v, "v")
    if v.shape[0] != a.shape[0]:
        raise DimensionError(f"v has length {v.shape[0]}, matrix has {a.shape[0]} rows")
    support = make_support(support, a.shape[1])
    values = a.T @ v
    if support:
        mags = np.abs(values[list(support)])
        s0 = float(mags.max())
        argmax = tuple(i for i, mag in zip(support, mags) if mag == s0)
    else:
        s0, argmax = 0.0, ()
    return CorrelationProfile(values, support, s0, argmax)


# ---------------------------------------------------------------------------
# Text I/O

def format_matrix(a):
    a = as_matrix(a)
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in a)
    return "\n".join(lines) + "\n"


def parse_matrix(text, path=None):
    lines = [(no, ln) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix file", path)
    no, header = lines[0]
    tokens = header.split()
    if len(tokens) != 2:
        raise MatrixFormatError(f"header must be 'rows cols', got {header.strip()!r}", path, no, 1)
    dims = []
    for tok in tokens:
        try:
            dims.append(int(tok))
        except ValueError:
            raise MatrixFormatError(f"bad dimension {tok!r}", path, no, header.index(tok) + 1) from None
    rows, cols = dims
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"dimensions must be positive, got {rows}x{cols}", path, no, 1)
    body = lines[1:]
    if len(body) != rows:
        raise InconsistentRowsError(f"expected {rows} rows, found {len(body)}", path, no)
    out = np.empty((rows, cols))
    for r, (no, line) in enumerate(body):
        tokens = line.split()
        if len(tokens) != cols:
            raise InconsistentRowsError(
                f"row {r + 1} has {len(tokens)} entries, expected {cols}", path, no
            )
        pos = 0
        for c, tok in enumerate(tokens):
            pos = line.index(tok, pos)
            try:
                val = float(tok)
            except ValueError:
                raise MatrixFormatError(f"cannot parse {tok!r} as a number", path, no, pos + 1) from None
            if not np.isfinite(val):
                raise MatrixFormatError(f"non-finite entry {tok!r}", path, no, pos + 1)
            out[r, c] = val
            pos += len(tok)
    return out


def save_matrix(a, path):
    Path(path).write_text(format_matrix(a))


def load_matrix(path):
    return parse_matrix(Path(path).read_text(), path=str(path))


def save_vector(v, path):
    v = as_vector(v)
    save_matrix(v[:, None], path)


def load_vector(path):
    a = load_matrix(path)
    if a.shape[1] == 1:
        return a[:, 0].copy()
    if a.shape[0] == 1:
        return a[0].copy()
    raise MatrixFormatError(f"expected a single row or column, got {a.shape[0]}x{a.shape[1]}", str(path))
