"""Exact arithmetic and linear algebra over prime fields GF(p)

Matrices are numpy int64 arrays kept reduced mod p. Elimination always takes
the first nonzero pivot in column order, so reduced forms are reproducible.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import (
    CorruptedInputError,
    DimensionError,
    FieldError,
    FieldMismatchError,
    NonInvertibleError,
)

THEOREM_PRECONDITIONS_UNMET = "theorem-preconditions-unmet"


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test"""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p)"""

    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, (int, np.integer)):
            raise FieldError(f"field modulus must be an integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))
        if not is_prime(self.p):
            raise FieldError(f"field modulus {self.p} is not prime")

    @property
    def theorem_preconditions_met(self) -> bool:
        """Converse arguments assume a field larger than GF(2)"""
        return self.p >= 3

    @property
    def flags(self) -> List[str]:
        return [] if self.theorem_preconditions_met else [THEOREM_PRECONDITIONS_UNMET]

    def element(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.p, self)

    def nonzero_values(self) -> range:
        return range(1, self.p)

    def __str__(self) -> str:
        return f"GF({self.p})"


@dataclass(frozen=True, eq=False)
class FieldElement:
    """Residue in [0, p) tied to its field"""

    value: int
    field: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value))
        if not 0 <= self.value < self.field.p:
            raise FieldError(f"{self.value} is not a residue of {self.field}")

    def _other(self, other) -> Optional[int]:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine {self.field} and {other.field} elements")
            return other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return int(other) % self.field.p
        return None

    def _make(self, value: int) -> "FieldElement":
        return FieldElement(value % self.field.p, self.field)

    def __add__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else self._make(self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else self._make(self.value - v)

    def __rsub__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else self._make(v - self.value)

    def __mul__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else self._make(self.value * v)

    __rmul__ = __mul__

    def __neg__(self):
        return self._make(-self.value)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise NonInvertibleError(f"zero has no inverse in {self.field}")
        return self._make(pow(self.value, -1, self.field.p))

    def __truediv__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        return self * self._make(v).inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.value == int(other) % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.p))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Sum of two elements of the same field"""
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    """Difference a - b"""
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Product of two elements of the same field"""
    return a * b


def neg(a: FieldElement) -> FieldElement:
    """Additive inverse"""
    return -a


def inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse

    Raises:
        NonInvertibleError: If a is zero
    """
    return a.inverse()


VectorLike = Union[Sequence[int], Sequence[FieldElement], np.ndarray]


def as_vector(field: FieldSpec, values: VectorLike) -> np.ndarray:
    """Convert ints or field elements to a reduced int64 vector"""
    out = []
    for v in values:
        if isinstance(v, FieldElement):
            if v.field != field:
                raise FieldMismatchError(f"vector entry from {v.field}, expected {field}")
            out.append(v.value)
        else:
            out.append(int(v) % field.p)
    return np.array(out, dtype=np.int64)


class Matrix:
    """Dense matrix over one prime field"""

    __slots__ = ("field", "_data")

    def __init__(self, field: FieldSpec, data):
        if isinstance(data, np.ndarray):
            arr = np.array(data, dtype=np.int64, copy=True)
        else:
            rows = [as_vector(field, row) for row in data]
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise DimensionError(f"ragged matrix rows: widths {sorted(widths)}")
            arr = np.array(rows, dtype=np.int64).reshape(len(rows), widths.pop() if widths else 0)
        if arr.ndim != 2:
            raise DimensionError(f"matrix data must be 2-dimensional, got {arr.ndim} dimensions")
        arr %= field.p
        arr.setflags(write=False)
        self.field = field
        self._data = arr

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Iterable[VectorLike]) -> "Matrix":
        return cls(field, list(rows))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, size: int) -> "Matrix":
        return cls(field, np.eye(size, dtype=np.int64))

    @property
    def array(self) -> np.ndarray:
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @property
    def entries(self) -> List[List[FieldElement]]:
        return [[FieldElement(v, self.field) for v in row] for row in self._data.tolist()]

    def __getitem__(self, index: Tuple[int, int]) -> FieldElement:
        r, c = index
        return FieldElement(int(self._data[r, c]), self.field)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self._data.T)

    def append_row(self, v: VectorLike) -> "Matrix":
        vec = as_vector(self.field, v)
        if vec.size != self.cols:
            raise DimensionError(f"row has {vec.size} entries, matrix has {self.cols} columns")
        return Matrix(self.field, np.vstack([self._data, vec.reshape(1, -1)]))

    def dot(self, v: VectorLike) -> np.ndarray:
        vec = as_vector(self.field, v)
        if vec.size != self.cols:
            raise DimensionError(f"vector has {vec.size} entries, matrix has {self.cols} columns")
        return (self._data @ vec) % self.field.p

    __matmul__ = dot

    def to_list(self) -> List[List[int]]:
        return self._data.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self._data, other._data)

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self._data.tolist()})"


def row_reduce(array: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form mod p and the pivot columns"""
    a = np.array(array, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.flatnonzero(a[r:, c])
        if nonzero.size == 0:
            continue
        pr = r + int(nonzero[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        factors = a[:, c].copy()
        factors[r] = 0
        if factors.any():
            a = (a - np.outer(factors, a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def unit_pivot_columns(array: np.ndarray, p: int) -> Set[int]:
    """Columns i whose unit vector e_i lies in the row space of array"""
    reduced, pivots = row_reduce(array, p)
    found = set()
    for row, c in enumerate(pivots):
        if np.count_nonzero(reduced[row]) == 1:
            found.add(c)
    return found


def mat_rank(m: Matrix) -> int:
    """Rank over GF(p)"""
    return len(row_reduce(m.array, m.field.p)[1])


def rowspace_member(m: Matrix, v: VectorLike) -> bool:
    """True iff v lies in the row space of m"""
    vec = as_vector(m.field, v)
    if vec.size != m.cols:
        raise DimensionError(f"vector has {vec.size} entries, matrix has {m.cols} columns")
    return mat_rank(m) == mat_rank(m.append_row(vec))


def decodable_indices(m: Matrix) -> Set[int]:
    """Unknowns of y = m.s that y determines uniquely"""
    return unit_pivot_columns(m.array, m.field.p)


def solve_for(m: Matrix, y: VectorLike, wanted: Iterable[int]) -> Dict[int, Optional[FieldElement]]:
    """Values of the wanted unknowns fixed by y = m.s; None where undetermined"""
    yv = as_vector(m.field, y)
    if yv.size != m.rows:
        raise DimensionError(f"observation has {yv.size} entries, matrix has {m.rows} rows")
    wanted = list(wanted)
    for i in wanted:
        if not 0 <= i < m.cols:
            raise DimensionError(f"unknown index {i} outside 0..{m.cols - 1}")

    augmented = np.hstack([m.array, yv.reshape(-1, 1)])
    reduced, pivots = row_reduce(augmented, m.field.p)
    if pivots and pivots[-1] == m.cols:
        raise CorruptedInputError("observation lies outside the image of the system matrix")

    pivot_row = {c: row for row, c in enumerate(pivots)}
    result: Dict[int, Optional[FieldElement]] = {}
    for i in wanted:
        row = pivot_row.get(i)
        if row is not None and np.count_nonzero(reduced[row, :m.cols]) == 1:
            result[i] = FieldElement(int(reduced[row, m.cols]), m.field)
        else:
            result[i] = None
    return result


def split_blocks(m: sparse.spmatrix) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Independent (rows, cols) blocks of a sparse linear system

    Two unknowns share a block when some equation involves both. Rows and
    columns with no nonzero entry form singleton blocks.
    """
    coo = sparse.coo_matrix(m)
    n_rows, n_cols = coo.shape
    size = n_rows + n_cols
    adjacency = sparse.coo_matrix(
        (np.ones(coo.nnz, dtype=np.int8), (coo.row, coo.col + n_rows)), shape=(size, size)
    )
    _, labels = connected_components(adjacency, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    blocks = []
    for nodes in np.split(order, bounds):
        blocks.append((nodes[nodes < n_rows], nodes[nodes >= n_rows] - n_rows))
    return blocks


def sparse_decodable_indices(m: sparse.spmatrix, p: int, wanted: Iterable[int]) -> Set[int]:
    """decodable_indices restricted to wanted, evaluated block by block"""
    wanted = set(wanted)
    csr = sparse.csr_matrix(m)
    found: Set[int] = set()
    for rows, cols in split_blocks(csr):
        targets = wanted.intersection(cols.tolist())
        if not targets or rows.size == 0:
            continue
        block = csr[rows][:, cols].toarray()
        local = unit_pivot_columns(block, p)
        found.update(int(cols[i]) for i in local if int(cols[i]) in targets)
    return found
