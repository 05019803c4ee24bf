"""Dense exact linear algebra over GF(2^b).

Matrices are immutable after construction and carry optional column labels
(the subfile index set, when the matrix is an encoder).  Rank, solving and
span membership all reduce to exact Gaussian elimination with first-nonzero
pivoting; there is no numerical tolerance anywhere.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .galois import Field, FieldElement


def _values_array(field: Field, data, shape_hint=None) -> np.ndarray:
    """Coerce nested sequences of ints or FieldElements into a uint32 array."""

    def conv(x):
        if isinstance(x, FieldElement):
            if x.field != field:
                raise ValueError("mixed-field entries")
            return x.value
        return int(x)

    if isinstance(data, np.ndarray) and data.dtype != object:
        arr = data.astype(np.uint32)
    else:
        arr = np.array([[conv(x) for x in row] for row in data] if shape_hint == 2
                       else [conv(x) for x in data], dtype=np.uint32)
    if arr.size and int(arr.max()) >= field.q:
        raise ValueError(f"entry out of range for GF(2^{field.b})")
    return arr


def as_vector(field: Field, v) -> np.ndarray:
    """1-D uint32 array of field-element values."""
    arr = _values_array(field, v, shape_hint=1)
    if arr.ndim != 1:
        raise ValueError("expected a vector")
    return np.ascontiguousarray(arr)


class Matrix:
    """An immutable rows x cols matrix over one GF(2^b) field."""

    __slots__ = ("field", "rows", "cols", "_a", "col_labels", "_rank")

    def __init__(self, field: Field, data, col_labels: Sequence | None = None):
        arr = _values_array(field, data, shape_hint=2)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D entry grid")
        self.field = field
        self.rows, self.cols = int(arr.shape[0]), int(arr.shape[1])
        a = np.ascontiguousarray(arr)
        a.setflags(write=False)
        self._a = a
        if col_labels is not None:
            col_labels = tuple(col_labels)
            if len(col_labels) != self.cols:
                raise ValueError("col_labels length must match the column count")
        self.col_labels = col_labels
        self._rank = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def identity(cls, field: Field, n: int, col_labels: Sequence | None = None) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.uint32), col_labels)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int,
              col_labels: Sequence | None = None) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.uint32), col_labels)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence],
                     col_labels: Sequence | None = None) -> "Matrix":
        arr = np.array([[int(x) for x in col] for col in columns], dtype=np.uint32).T
        if len(columns) == 0:
            arr = arr.reshape(0, 0)
        return cls(field, arr, col_labels)

    # -- access ----------------------------------------------------------------

    def values(self) -> np.ndarray:
        """Read-only uint32 view of the entries."""
        return self._a

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(int(self._a[i, j]), self.field)

    @property
    def entries(self) -> tuple[FieldElement, ...]:
        """Row-major entries as field elements."""
        return tuple(FieldElement(int(v), self.field) for v in self._a.ravel())

    def column_values(self, j: int) -> np.ndarray:
        return self._a[:, j].copy()

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self._a.T.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and other.field == self.field
            and other.col_labels == self.col_labels
            and other._a.shape == self._a.shape
            and bool(np.array_equal(other._a, self._a))
        )

    def __hash__(self):
        return hash((self.field, self.col_labels, self._a.tobytes(), self._a.shape))

    def __repr__(self) -> str:
        return f"Matrix(gf2^{self.field.b}, {self.rows}x{self.cols})"

    # -- algebra ----------------------------------------------------------------

    def rank(self) -> int:
        if self._rank is None:
            work = self._a.copy()
            r, _ = kernels.rref(work, self.field.kernel_spec())
            self._rank = int(r)
        return self._rank

    def mul_vector(self, v) -> np.ndarray:
        vec = as_vector(self.field, v)
        if vec.shape[0] != self.cols:
            raise ValueError(f"dimension mismatch: {self.cols} columns, vector of {vec.shape[0]}")
        return kernels.matvec(self._a, vec, self.field.kernel_spec())

    # -- serialization ------------------------------------------------------------

    def to_text(self) -> str:
        fmt = self.field.format_value
        lines = [f"{self.field.descriptor()} {self.rows} {self.cols}"]
        for i in range(self.rows):
            lines.append(" ".join(fmt(int(v)) for v in self._a[i]))
        if self.col_labels is not None:
            lines.append("cols " + " ".join(label_to_token(l) for l in self.col_labels))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Matrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix file")
        head = lines[0].split()
        if len(head) != 3:
            raise ValueError(f"malformed matrix header {lines[0]!r}")
        field = Field.from_descriptor(head[0])
        rows, cols = int(head[1]), int(head[2])
        if len(lines) < 1 + rows:
            raise ValueError("matrix file truncated")
        data = []
        for i in range(rows):
            toks = lines[1 + i].split()
            if len(toks) != cols:
                raise ValueError(f"row {i} has {len(toks)} entries, expected {cols}")
            data.append([field.parse_value(t) for t in toks])
        labels = None
        for ln in lines[1 + rows:]:
            if ln.startswith("cols "):
                labels = tuple(token_to_label(t) for t in ln.split()[1:])
        if not data:
            data = np.zeros((0, cols), dtype=np.uint32)
        return cls(field, data, labels)

    def to_file(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_file(cls, path) -> "Matrix":
        return cls.from_text(Path(path).read_text())


def label_to_token(label) -> str:
    """Serialize a column/row label: ints plain, tuples comma-joined.

    A 1-tuple keeps a trailing comma ("3," like Python syntax) so that it
    stays distinguishable from a plain int.
    """
    if isinstance(label, tuple):
        return ",".join(str(x) for x in label) + ("," if len(label) == 1 else "")
    return str(label)


def token_to_label(token: str):
    if "," in token:
        return tuple(int(x) for x in token.split(",") if x)
    return int(token)


def rank(m: Matrix) -> int:
    """Rank by exact Gaussian elimination."""
    return m.rank()


def submatrix_cols(m: Matrix, labels: Iterable) -> Matrix:
    """Columns of m whose labels are in the given set, in sorted-label order."""
    if m.col_labels is None:
        raise ValueError("matrix has no column labels")
    pos = {lab: j for j, lab in enumerate(m.col_labels)}
    wanted = sorted(set(labels))
    idx = []
    for lab in wanted:
        if lab not in pos:
            raise KeyError(f"unknown column label {lab!r}")
        idx.append(pos[lab])
    sub = m._a[:, idx] if idx else np.zeros((m.rows, 0), dtype=np.uint32)
    return Matrix(m.field, sub, tuple(wanted))


def solve_consistent(a: Matrix, b) -> tuple[np.ndarray | None, bool]:
    """Some x with a.x = b, or None if the system is inconsistent.

    The second element tells whether the solution is unique (full column
    rank).  Free variables, when present, are set to zero.
    """
    vec = as_vector(a.field, b)
    if vec.shape[0] != a.rows:
        raise ValueError("right-hand side length must equal the row count")
    x, unique, _ = _solve_values(a._a, vec, a.field)
    return x, unique


def _solve_values(a: np.ndarray, b: np.ndarray, field: Field):
    """(x | None, unique, coefficient rank) for the raw-array system a.x = b."""
    rows, cols = a.shape
    aug = np.empty((rows, cols + 1), dtype=np.uint32)
    aug[:, :cols] = a
    aug[:, cols] = b
    rk, pivots = kernels.rref(aug, field.kernel_spec())
    if len(pivots) and pivots[-1] == cols:
        return None, False, rk - 1
    x = np.zeros(cols, dtype=np.uint32)
    for i, p in enumerate(pivots):
        x[p] = aug[i, cols]
    return x, rk == cols, rk


def in_span(m: Matrix, v) -> bool:
    """Whether v lies in the column span of m (rank test on [m | v])."""
    vec = as_vector(m.field, v)
    if vec.shape[0] != m.rows:
        raise ValueError("vector length must equal the row count")
    x, _, _ = _solve_values(m._a, vec, m.field)
    return x is not None
