"""Exact linear algebra over Q or Q(sqrt d) with deterministic pivoting.

Vectors are either dense lists or sparse dicts ``{index: scalar}``.  Elimination
works on sparse rows; the pivot of a row is its first nonzero column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

SparseVec = Dict[int, object]


class Matrix:
    """Immutable rectangular matrix with exact entries."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Sequence[Sequence], cols: Optional[int] = None):
        rows = [tuple(_exact(x) for x in r) for r in data]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self._data = tuple(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[SparseVec], nrows: int) -> Matrix:
        data = [[0] * len(columns) for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                data[i][j] = v
        return cls(data, len(columns))

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> list:
        return [r[j] for r in self._data]

    def tolist(self) -> List[list]:
        return [list(r) for r in self._data]

    def transpose(self) -> Matrix:
        return Matrix([[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError("dimension mismatch")
            ot = other.transpose()
            return Matrix([[_dot(r, c) for c in ot._data] for r in self._data], other.cols)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        return [_dot(r, vec) for r in self._data]

    def __add__(self, other: Matrix) -> Matrix:
        _same_shape(self, other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], self.cols)

    def __sub__(self, other: Matrix) -> Matrix:
        _same_shape(self, other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], self.cols)

    def scale(self, c) -> Matrix:
        return Matrix([[c * a for a in r] for r in self._data], self.cols)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.cols == other.cols and self._data == other._data

    def __hash__(self):
        return hash((self.cols, self._data))

    def __repr__(self):
        return f"Matrix({self.tolist()!r})"

    def sparse_rows(self) -> List[SparseVec]:
        return [{j: v for j, v in enumerate(r) if v} for r in self._data]


def _exact(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return x


def _dot(r, c):
    total = Fraction(0)
    for a, b in zip(r, c):
        if a and b:
            total = total + a * b
    return total


def _same_shape(a: Matrix, b: Matrix):
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError("dimension mismatch")


def block_diagonal(*blocks: Matrix) -> Matrix:
    n = sum(b.rows for b in blocks)
    m = sum(b.cols for b in blocks)
    data = [[Fraction(0)] * m for _ in range(n)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                data[r0 + i][c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return Matrix(data, m)


# sparse vector helpers

def axpy(y: SparseVec, c, x: SparseVec) -> SparseVec:
    """Return y + c*x as a new sparse vector."""
    out = dict(y)
    for j, v in x.items():
        s = out.get(j, 0) + c * v
        if s:
            out[j] = s
        else:
            out.pop(j, None)
    return out


def _axpy_inplace(y: SparseVec, c, x: SparseVec):
    for j, v in x.items():
        s = y.get(j, 0) + c * v
        if s:
            y[j] = s
        else:
            y.pop(j, None)


class Echelon:
    """Incrementally maintained reduced row echelon basis of a row space.

    Each stored row is normalized so its pivot (first nonzero column) equals 1
    and every other stored row vanishes at that column.
    """

    def __init__(self):
        self.rows: Dict[int, SparseVec] = {}

    def reduce(self, v: SparseVec) -> SparseVec:
        w = {j: x for j, x in v.items() if x}
        for p in sorted(set(w) & set(self.rows)):
            c = w.get(p)
            if c:
                _axpy_inplace(w, -c, self.rows[p])
        return w

    def insert(self, v: SparseVec) -> Optional[int]:
        """Add v to the span; returns the new pivot or None if v was dependent."""
        w = self.reduce(v)
        if not w:
            return None
        p = min(w)
        inv = 1 / w[p]
        w = {j: x * inv for j, x in w.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                _axpy_inplace(row, -c, w)
        self.rows[p] = w
        return p

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> List[int]:
        return sorted(self.rows)


@dataclass(frozen=True)
class LinearSolution:
    rank: int
    kernel: List[list]
    image: List[list]
    pivots: List[int]


def _as_sparse_rows(M) -> (List[SparseVec], int, int):
    if isinstance(M, Matrix):
        return M.sparse_rows(), M.rows, M.cols
    raise TypeError("expected Matrix")


def rref(M: Matrix) -> (Echelon, int):
    rows, _, cols = _as_sparse_rows(M)
    ech = Echelon()
    for r in rows:
        ech.insert(r)
    return ech, cols


def kernel_from_echelon(ech: Echelon, cols: int) -> List[SparseVec]:
    pivots = set(ech.rows)
    out = []
    for f in range(cols):
        if f in pivots:
            continue
        v = {f: Fraction(1)}
        for p, row in ech.rows.items():
            c = row.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def solve_linear(M: Matrix) -> LinearSolution:
    """Rank, kernel basis and column-space basis of M."""
    ech, cols = rref(M)
    kernel = [_dense(v, cols) for v in kernel_from_echelon(ech, cols)]
    piv = ech.pivots()
    image = [M.column(j) for j in piv]
    return LinearSolution(ech.rank, kernel, image, piv)


def rank(M: Matrix) -> int:
    return rref(M)[0].rank


def solve_affine(M: Matrix, b: Sequence) -> Optional[list]:
    """A particular solution x of M x = b, or None when the system is inconsistent."""
    if len(b) != M.rows:
        raise ValueError("dimension mismatch")
    x = solve_sparse_columns([{i: M[i, j] for i in range(M.rows) if M[i, j]} for j in range(M.cols)],
                             {i: _exact(v) for i, v in enumerate(b) if v})
    if x is None:
        return None
    return _dense(x, M.cols)


def solve_sparse_columns(columns: Sequence[SparseVec], b: SparseVec) -> Optional[SparseVec]:
    """Solve sum_j x_j columns[j] = b, or return None when b is not in the span.

    Rows of [M^T | I] are reduced; the canonical remainder of (b, 0) has zero
    M-part exactly when b is in the column space, and then its tag part is -x.
    """
    used = [max(c) for c in columns if c] + ([max(b)] if b else [])
    offset = 1 + max(used, default=0)
    ech = Echelon()
    for j, col in enumerate(columns):
        row = dict(col)
        row[offset + j] = Fraction(1)
        ech.insert(row)
    w = ech.reduce(b)
    if any(j < offset for j in w):
        return None
    return {j - offset: -v for j, v in w.items()}


def _dense(v: SparseVec, n: int) -> list:
    out = [Fraction(0)] * n
    for j, x in v.items():
        out[j] = x
    return out


def determinant(M: Matrix):
    if M.rows != M.cols:
        raise ValueError("determinant of non-square matrix")
    n = M.rows
    a = M.tolist()
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det = det * a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c]
            if f:
                f = f * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def rank_fraction_free(M: Matrix) -> int:
    """Rank of a rational matrix by Bareiss elimination on an integer rescaling."""
    rows = []
    for r in M.tolist():
        den = 1
        for x in r:
            den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
        rows.append([int(Fraction(x) * den) for x in r])
    n, m = len(rows), M.cols
    rk = 0
    prev = 1
    for c in range(m):
        p = next((r for r in range(rk, n) if rows[r][c]), None)
        if p is None:
            continue
        rows[rk], rows[p] = rows[p], rows[rk]
        piv = rows[rk][c]
        for r in range(rk + 1, n):
            rows[r] = [(piv * rows[r][j] - rows[r][c] * rows[rk][j]) // prev for j in range(m)]
        prev = piv
        rk += 1
        if rk == n:
            break
    return rk


def inverse(M: Matrix) -> Matrix:
    n = M.rows
    if n != M.cols:
        raise ValueError("inverse of non-square matrix")
    if rank(M) < n:
        raise ZeroDivisionError("singular matrix")
    cols = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        x = solve_affine(M, e)
        if x is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(x)
    return Matrix([[cols[j][i] for j in range(n)] for i in range(n)], n)


def in_span(vectors: Iterable[SparseVec], v: SparseVec) -> bool:
    ech = Echelon()
    for u in vectors:
        ech.insert(u)
    return not ech.reduce(v)
