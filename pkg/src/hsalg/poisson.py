"""Laurent-polynomial bivectors: Jacobi identity, inversion of algebroid 2-forms, rank-drop order."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .jets import right_invariant_coeffs
from .laurent import LaurentPoly, divide_exact, parse_laurent

PolyMatrix = List[List[LaurentPoly]]


class SingularForm(ArithmeticError):
    pass


def _zero(variables) -> LaurentPoly:
    return LaurentPoly(variables, {})


def _const(variables, c) -> LaurentPoly:
    return LaurentPoly.constant(variables, c)


@dataclass(frozen=True)
class LaurentBivector:
    vars: Tuple[str, ...]
    matrix: Tuple[Tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        n = len(self.vars)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("bivector matrix must be square of size len(vars)")
        for i in range(n):
            if self.matrix[i][i]:
                raise ValueError("diagonal entries must vanish")
            for j in range(i + 1, n):
                if self.matrix[i][j] != -self.matrix[j][i]:
                    raise ValueError(f"entries ({i},{j}) are not antisymmetric")

    @classmethod
    def from_entries(cls, variables: Sequence[str], entries: Dict[Tuple[str, str], LaurentPoly]) -> LaurentBivector:
        variables = tuple(variables)
        n = len(variables)
        m = [[_zero(variables) for _ in range(n)] for _ in range(n)]
        for (a, b), p in entries.items():
            i, j = variables.index(a), variables.index(b)
            if i == j:
                raise ValueError(f"bracket of {a} with itself")
            m[i][j] = m[i][j] + p
            m[j][i] = m[j][i] - p
        return cls(variables, tuple(tuple(r) for r in m))

    @classmethod
    def from_matrix(cls, variables: Sequence[str], m: PolyMatrix) -> LaurentBivector:
        return cls(tuple(variables), tuple(tuple(r) for r in m))

    def __getitem__(self, ij) -> LaurentPoly:
        return self.matrix[ij[0]][ij[1]]

    def bracket(self, a: str, b: str) -> LaurentPoly:
        return self.matrix[self.vars.index(a)][self.vars.index(b)]

    def to_json(self) -> dict:
        n = len(self.vars)
        entries = [[self.vars[i], self.vars[j], str(self.matrix[i][j])]
                   for i in range(n) for j in range(i + 1, n) if self.matrix[i][j]]
        return {"vars": list(self.vars), "entries": entries}

    @classmethod
    def from_json(cls, doc: dict) -> LaurentBivector:
        variables = tuple(doc["vars"])
        entries: Dict[Tuple[str, str], LaurentPoly] = {}
        for n, row in enumerate(doc.get("entries", [])):
            if len(row) != 3:
                raise ValueError(f"entry {n}: expected [var, var, polynomial]")
            a, b, text = row
            for v in (a, b):
                if v not in variables:
                    raise ValueError(f"entry {n}: unknown variable {v!r}")
            key = (a, b)
            entries[key] = entries.get(key, _zero(variables)) + parse_laurent(str(text), variables)
        return cls.from_entries(variables, entries)


def schouten_jacobi(Q: LaurentBivector) -> Dict[Tuple[int, int, int], LaurentPoly]:
    """Nonzero components J^{ijk}, i<j<k, of [Q, Q] up to a constant factor."""
    n = len(Q.vars)
    partials = [[[Q.matrix[i][j].partial(v) for v in Q.vars] for j in range(n)] for i in range(n)]
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                total = _zero(Q.vars)
                for l in range(n):
                    total = total + Q.matrix[l][i] * partials[j][k][l] \
                        + Q.matrix[l][j] * partials[k][i][l] + Q.matrix[l][k] * partials[i][j][l]
                if total:
                    out[(i, j, k)] = total
    return out


def is_poisson(Q: LaurentBivector) -> bool:
    return not schouten_jacobi(Q)


def check_translation_invariance(Q: LaurentBivector, names: Sequence[str]) -> bool:
    return not any(p.depends_on(v) for row in Q.matrix for p in row for v in names)


# determinants, adjugates and Pfaffians over the Laurent ring

def pfaffian(m: Sequence[Sequence[LaurentPoly]], variables: Sequence[str]) -> LaurentPoly:
    n = len(m)
    if n % 2:
        raise ValueError("Pfaffian needs an even-dimensional matrix")
    if n == 0:
        return _const(variables, 1)
    total = _zero(variables)
    for j in range(1, n):
        if not m[0][j]:
            continue
        keep = [x for x in range(1, n) if x != j]
        minor = [[m[a][b] for b in keep] for a in keep]
        sign = 1 if j % 2 else -1
        total = total + m[0][j] * pfaffian(minor, variables) * sign
    return total


def bareiss_adjugate(m: Sequence[Sequence[LaurentPoly]], variables) -> Tuple[LaurentPoly, PolyMatrix]:
    """(D, R) with m^{-1} = R / D, by fraction-free Gauss-Jordan on [m | I]."""
    n = len(m)
    one, zero = _const(variables, 1), _zero(variables)
    a = [list(m[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    prev = one
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            raise SingularForm("form matrix is singular")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        for i in range(n):
            if i == k:
                continue
            f = a[i][k]
            a[i] = [divide_exact(p * a[i][j] - f * a[k][j], prev) for j in range(2 * n)]
        prev = p
    for i in range(n - 1):
        # Gauss-Jordan rows carry stale pivots; rescale so each diagonal equals the last pivot
        if a[i][i] != prev:
            scale = divide_exact(prev, a[i][i])
            a[i] = [x * scale for x in a[i]]
    return prev, [row[n:] for row in a]


def _minor(m, i, j):
    return [[m[a][b] for b in range(len(m)) if b != j] for a in range(len(m)) if a != i]


def cofactor_det(m: Sequence[Sequence[LaurentPoly]], variables) -> LaurentPoly:
    n = len(m)
    if n == 0:
        return _const(variables, 1)
    total = _zero(variables)
    for j in range(n):
        if m[0][j]:
            total = total + m[0][j] * cofactor_det(_minor(m, 0, j), variables) * (-1 if j % 2 else 1)
    return total


def cofactor_adjugate(m: Sequence[Sequence[LaurentPoly]], variables) -> Tuple[LaurentPoly, PolyMatrix]:
    """(det m, adj m) from cofactor expansion."""
    n = len(m)
    adj = [[cofactor_det(_minor(m, j, i), variables) * (-1 if (i + j) % 2 else 1) for j in range(n)]
           for i in range(n)]
    return cofactor_det(m, variables), adj


def _matmul(x: PolyMatrix, y: PolyMatrix, variables) -> PolyMatrix:
    return [[sum((x[i][l] * y[l][j] for l in range(len(y))), _zero(variables)) for j in range(len(y[0]))]
            for i in range(len(x))]


def _transpose(x: PolyMatrix) -> PolyMatrix:
    return [list(r) for r in zip(*x)]


@dataclass
class FrameData:
    """Anchor rho (columns = frame vectors in coordinates) and form omega on the frame."""

    vars: Tuple[str, ...]
    rho: PolyMatrix
    omega: PolyMatrix

    def __post_init__(self):
        n = len(self.vars)
        for name, m in (("rho", self.rho), ("omega", self.omega)):
            if len(m) != n or any(len(r) != n for r in m):
                raise ValueError(f"{name} must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                if self.omega[i][j] != -self.omega[j][i]:
                    raise ValueError("omega must be antisymmetric")


def invert_form(fd: FrameData, method: str = "bareiss") -> LaurentBivector:
    """Q = rho omega^{-1} rho^T with exact Laurent division."""
    v = fd.vars
    if method == "bareiss":
        det, adj = bareiss_adjugate(fd.omega, v)
    elif method == "cofactor":
        det, adj = cofactor_adjugate(fd.omega, v)
        if not det:
            raise SingularForm("form matrix is singular")
    else:
        raise ValueError(f"unknown method {method!r}")
    num = _matmul(_matmul(fd.rho, adj, v), _transpose(fd.rho), v)
    try:
        q = [[divide_exact(x, det) for x in row] for row in num]
    except ArithmeticError as exc:
        raise SingularForm(f"inverse is not a Laurent polynomial: {exc}") from None
    return LaurentBivector.from_matrix(v, q)


@dataclass
class RankDrop:
    pfaffian: LaurentPoly
    order: int

    def to_json(self) -> dict:
        return {"pfaffian": str(self.pfaffian), "order": self.order}


def rank_drop_order(Q: LaurentBivector, var: str) -> RankDrop:
    """Order of vanishing of Pf(Q) along var = 0."""
    if len(Q.vars) % 2:
        raise ValueError("rank-drop order needs an even number of variables")
    pf = pfaffian(Q.matrix, Q.vars)
    if not pf:
        raise ValueError("Pfaffian vanishes identically")
    order = pf.min_exponent(var)
    rest = pf * LaurentPoly.monomial(Q.vars, {var: -order})
    if not rest.substitute({var: 0}):
        raise ArithmeticError("complementary factor vanishes at var = 0")
    return RankDrop(pf, order)


# builtin bivectors and frame data

INTRO_VARS = ("u", "x", "y", "t")


def intro_bracket() -> LaurentBivector:
    v = INTRO_VARS
    p = lambda s: parse_laurent(s, v)
    return LaurentBivector.from_entries(v, {
        ("x", "y"): p("3*u^3"), ("u", "x"): p("t^2*u^2"), ("y", "u"): p("2*t*u^3"),
        ("x", "t"): p("2*t^3*u"), ("y", "t"): p("-t^2*u^2"),
    })


def universal_frame(k: int) -> Tuple[Tuple[str, ...], PolyMatrix]:
    """Coordinates (u, a_1..a_{k-1}, t) and the frame V_0 + t d_t, V_i + t^{i+1} d_t, t^{k+1} d_t."""
    names = ("u",) + tuple(f"a{i}" for i in range(1, k)) + ("t",)
    n = k + 1
    rho = [[_zero(names) for _ in range(n)] for _ in range(n)]
    t = LaurentPoly.var(names, "t")
    # V_0 = u d_u - sum i a_i d_{a_i}
    rho[0][0] = LaurentPoly.var(names, "u")
    for i in range(1, k):
        rho[i][0] = LaurentPoly.var(names, f"a{i}") * (-i)
    rho[n - 1][0] = t
    for r in range(1, k):
        for i, p in right_invariant_coeffs(r, k).items():
            rho[i][r] = LaurentPoly(names, {(0,) + e + (0,): c for e, c in p.terms.items()})
        rho[n - 1][r] = t ** (r + 1)
    rho[n - 1][k] = t ** (k + 1)
    return names, rho


def universal_form_algebraic(k: int, names: Sequence[str]) -> PolyMatrix:
    """varpi = dt_k = sum_i (i-k) x_i ^ tau_{k-i} on the frame: x_i(e_j) = delta, tau_r(e_j) = t^{j-r}, j >= r."""
    n = k + 1
    t = LaurentPoly.var(names, "t")

    def x(i, j):
        return _const(names, 1 if i == j and j < k else 0)

    def tau(r, j):
        return t ** (j - r) if j >= r else _zero(names)

    om = [[_zero(names) for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for l in range(n):
            tot = _zero(names)
            for i in range(k):
                tot = tot + (x(i, j) * tau(k - i, l) - x(i, l) * tau(k - i, j)) * (i - k)
            om[j][l] = tot
    return om


def universal_form_coordinates(k: int, names: Sequence[str], rho: PolyMatrix) -> PolyMatrix:
    """Independent route: theta = last row of rho^{-1}, varpi = d theta, omega = rho^T varpi rho."""
    det, adj = cofactor_adjugate(rho, names)
    theta = [divide_exact(c, det) for c in adj[-1]]
    n = len(names)
    dth = [[theta[b].partial(names[a]) - theta[a].partial(names[b]) for b in range(n)] for a in range(n)]
    return _matmul(_matmul(_transpose(rho), dth, names), rho, names)


def universal_frame_data(n: int) -> FrameData:
    """Frame data of varpi_{2n+1} on E_{2n+1}."""
    k = 2 * n + 1
    names, rho = universal_frame(k)
    return FrameData(names, rho, universal_form_algebraic(k, names))
