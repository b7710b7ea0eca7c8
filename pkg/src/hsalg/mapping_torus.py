"""Twisted cohomology of mapping tori with torus-like fibres, over Q or Q(sqrt d)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence

from .linalg import Matrix, block_diagonal, determinant, rank, solve_linear
from .scalars import QuadScalar, field_of, format_rational

GAMMA = Matrix([[2, 1], [1, 1]])


def _lift(x, d: int):
    """x as a scalar of Q(sqrt d) (d = 0 means Q)."""
    if not d:
        return x
    if isinstance(x, QuadScalar):
        return x
    return QuadScalar(Fraction(x), 0, d)


def _field_matrix(M: Matrix, d: int) -> Matrix:
    return Matrix([[_lift(x, d) for x in row] for row in M.tolist()], M.cols)


def wedge_power_map(A: Matrix, r: int) -> Matrix:
    """Matrix of the r-th exterior power in the lexicographic multi-index basis."""
    n = A.rows
    if A.cols != n:
        raise ValueError("need a square matrix")
    if not 0 <= r <= n:
        raise ValueError(f"degree {r} outside 0..{n}")
    idx = list(combinations(range(n), r))
    if r == 0:
        return Matrix([[1]])
    rows = []
    for I in idx:
        rows.append([determinant(Matrix([[A[i, j] for j in J] for i in I], r)) for J in idx])
    return Matrix(rows, len(idx))


def _shift(M: Matrix, mu) -> Matrix:
    d = field_of(mu)
    base = _field_matrix(M, d)
    mu = _lift(mu, d)
    return Matrix([[base[i, j] - (mu if i == j else 0) for j in range(M.cols)] for i in range(M.rows)], M.cols)


def kernel_dim(M: Matrix, mu) -> int:
    """dim ker(M - mu)."""
    return M.cols - rank(_shift(M, mu))


def cokernel_dim(M: Matrix, mu) -> int:
    return M.rows - rank(_shift(M, mu))


@dataclass
class TorusMonodromy:
    """The map on H^1 of the fibre; higher degrees are its wedge powers unless given explicitly."""

    A: Matrix
    explicit: Dict[int, Matrix] = field(default_factory=dict)

    def __post_init__(self):
        if self.A.rows != self.A.cols:
            raise ValueError("monodromy must be square")
        det = determinant(self.A)
        if det not in (1, -1) and not self.explicit:
            raise ValueError(f"monodromy must be invertible over Z (det = {det})")

    @property
    def n(self) -> int:
        return self.A.rows

    def degree_map(self, r: int) -> Optional[Matrix]:
        if r in self.explicit:
            return self.explicit[r]
        if self.explicit:
            return None
        if 0 <= r <= self.n:
            return wedge_power_map(self.A, r)
        return None


@dataclass(frozen=True)
class TwistedDims:
    degree: int
    dim: int
    kernel: int
    cokernel: int

    def to_json(self) -> dict:
        return {"degree": self.degree, "dim": self.dim, "kernel": self.kernel, "cokernel": self.cokernel}


def twisted_dims(tm: TorusMonodromy, mu, r: int) -> TwistedDims:
    """dim H^r = dim ker(phi_r - mu) + dim coker(phi_{r-1} - mu)."""
    if not mu:
        raise ValueError("mu must be nonzero")
    cur = tm.degree_map(r)
    prev = tm.degree_map(r - 1)
    ker = kernel_dim(cur, mu) if cur is not None else 0
    cok = cokernel_dim(prev, mu) if prev is not None else 0
    return TwistedDims(r, ker + cok, ker, cok)


def local_system_cohomology(M: Matrix):
    """(dim H^0, dim H^1) of the circle with monodromy M."""
    return kernel_dim(M, 1), cokernel_dim(M, 1)


def eigenspace_basis(A: Matrix, mu) -> List[list]:
    return solve_linear(_shift(A, mu)).kernel


def golden_eigenvalue() -> QuadScalar:
    """rho_eig = (3 + sqrt5)/2, the expanding eigenvalue of GAMMA."""
    return QuadScalar(Fraction(3, 2), Fraction(1, 2), 5)


def cat_monodromy(g1: int = 1, g2: int = 1, inverse: bool = False) -> TorusMonodromy:
    """GAMMA^{(+)g1} (+) (GAMMA^2)^{(+)g2} on H^1, or the inverse blocks."""
    g = GAMMA
    g2m = GAMMA @ GAMMA
    if inverse:
        g = Matrix([[1, -1], [-1, 2]])
        g2m = g @ g
    return TorusMonodromy(block_diagonal(*([g] * g1 + [g2m] * g2)))


@dataclass
class CatMapReport:
    rho_eig: QuadScalar
    dims: Dict[str, int]
    inverse_convention_dims: Dict[str, int]
    inverted_twist_dims: Dict[str, int]
    eigenvector: list
    lastcat: Dict[str, int]

    @property
    def base_case_holds(self) -> bool:
        return tuple(self.dims.values()) == (1, 1, 1)

    def to_json(self) -> dict:
        return {"rho_eig": str(self.rho_eig), "dims": self.dims,
                "inverse_convention_dims": self.inverse_convention_dims,
                "inverted_twist_dims": self.inverted_twist_dims,
                "eigenvector_rho_eig": [str(x) for x in self.eigenvector],
                "lastcat": self.lastcat}


def _cat_dims(tm: TorusMonodromy, r) -> Dict[str, int]:
    return {"H1(L^-1)": twisted_dims(tm, r, 1).dim,
            "H1(L^-2)": twisted_dims(tm, r ** 2, 1).dim,
            "H2(L^-3)": twisted_dims(tm, r ** 3, 2).dim}


def cat_map_report(g1: int = 1, g2: int = 1) -> CatMapReport:
    r = golden_eigenvalue()
    tm = cat_monodromy()
    dims = _cat_dims(tm, r)
    inv = _cat_dims(cat_monodromy(inverse=True), r)
    flipped = _cat_dims(tm, 1 / r)
    vec = eigenspace_basis(GAMMA, r)[0]
    # lastcat: H^1(N) of S_{g1} x S_{g2}; only H^1 eigenspaces enter
    big = cat_monodromy(g1, g2).A
    d1 = kernel_dim(big, r)
    d2 = kernel_dim(big, r ** 2)
    last = {"g1": g1, "g2": g2, "d(lambda)": d1, "d(2lambda)": d2, "sphere_dim": d1 + d2 - 1}
    return CatMapReport(r, dims, inv, flipped, vec, last)


def parse_matrix(text: str) -> Matrix:
    """'[[2,1],[1,1]]' style integer/rational matrix."""
    import json
    rows = json.loads(text)
    return Matrix([[Fraction(str(x)) for x in row] for row in rows])
