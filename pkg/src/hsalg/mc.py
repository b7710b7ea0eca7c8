"""Maurer-Cartan data over finite models, extension classes and the S_k complex.

A splitting is (a; eta_1..eta_{k-1}) over a base model: a is the flat connection
form (nabla = d - a on L) and eta_i is a twisted 1-form with values in L^{-i}.
Weight conventions: on a weight-w object the differential is d - w*a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cdga import (BasisElement, ClassResult, Cohomology, CochainComplex, ExplicitComplex, FiniteCdga,
                   GradedElement, ModelError, NotClosed, Subcomplex, TwistedComplex, class_of, cohomology,
                   quotient_by_ideal, render_vector)
from .linalg import Matrix, SparseVec, axpy, determinant, rank, solve_linear, solve_sparse_columns


class MaurerCartanFailure(ModelError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


@dataclass
class SplittingData:
    base: FiniteCdga
    a: GradedElement
    k: int
    etas: Tuple[GradedElement, ...]

    def __post_init__(self):
        self.etas = tuple(self.etas)
        if self.k < 1:
            raise ModelError("order k must be at least 1")
        if len(self.etas) != self.k - 1:
            raise ModelError(f"need k-1 = {self.k - 1} forms eta_1..eta_(k-1), got {len(self.etas)}")
        for e in (self.a,) + self.etas:
            if e.model is not self.base:
                raise ModelError("forms must live in the base model")
            if e.coeffs and e.require_degree() != 1:
                raise ModelError(f"{e} is not a 1-form")
        if self.a.d().coeffs:
            raise NotClosed(f"connection form {self.a} is not closed")

    def eta(self, i: int) -> GradedElement:
        """eta_i for 1 <= i <= k-1, zero otherwise."""
        if 1 <= i <= self.k - 1:
            return self.etas[i - 1]
        return self.base.zero()

    def twisted(self, weight: int) -> TwistedComplex:
        return TwistedComplex(self.base, weight, self.a)


def twisted_d(s: SplittingData, x: GradedElement, weight: int) -> GradedElement:
    return GradedElement(s.base, s.twisted(weight).apply_d(x.coeffs))


# Maurer-Cartan

@dataclass
class MCReport:
    residuals: Dict[int, GradedElement]

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def failures(self) -> Dict[int, GradedElement]:
        return {r: v for r, v in self.residuals.items() if not v.is_zero()}

    def to_json(self) -> dict:
        return {"passed": self.passed, "residuals": {str(r): str(v) for r, v in self.residuals.items()}}


def bracket_sum(s: SplittingData, r: int) -> GradedElement:
    """1/2 sum_{i+j=r} (j-i) eta_i ^ eta_j."""
    total = s.base.zero()
    for i in range(1, r):
        j = r - i
        total = total + (s.eta(i) ^ s.eta(j)) * Fraction(j - i, 2)
    return total


def check_maurer_cartan(s: SplittingData) -> MCReport:
    res = {}
    for r in range(1, s.k):
        res[r] = twisted_d(s, s.eta(r), -r) + bracket_sum(s, r)
    return MCReport(res)


def extension_form(s: SplittingData) -> GradedElement:
    """e(sigma) = 1/2 sum_{i+j=k} (j-i) eta_i ^ eta_j."""
    return bracket_sum(s, s.k)


def extension_form_alt(s: SplittingData) -> GradedElement:
    """The same form as sum_{i < k/2} (k-2i) eta_i ^ eta_{k-i}."""
    total = s.base.zero()
    for i in range(1, s.k):
        if 2 * i < s.k:
            total = total + (s.eta(i) ^ s.eta(s.k - i)) * (s.k - 2 * i)
    return total


def extension_form_weighted(s: SplittingData) -> GradedElement:
    """The same form as sum_{r=1}^{k-1} r eta_{k-r} ^ eta_r."""
    total = s.base.zero()
    for r in range(1, s.k):
        total = total + (s.eta(s.k - r) ^ s.eta(r)) * r
    return total


@dataclass
class ExtensionResult:
    form: GradedElement
    klass: ClassResult
    complex: TwistedComplex

    @property
    def nonzero(self) -> bool:
        return not self.klass.exact

    def to_json(self) -> dict:
        return {"form": str(self.form), "weight": -self.complex.weight if self.complex.weight else 0,
                "nonzero": self.nonzero,
                "coordinates": [str(c) for c in self.klass.coordinates]}


def extension_class(s: SplittingData) -> ExtensionResult:
    mc = check_maurer_cartan(s)
    if not mc.passed:
        raise MaurerCartanFailure("Maurer-Cartan equation fails", mc.failures())
    e = extension_form(s)
    cx = s.twisted(-s.k)
    return ExtensionResult(e, class_of(e, cx), cx)


# the S_k algebra

@dataclass
class SkAlgebra:
    """base (+) sum_r base*t_r as one cdga; S-part indices are n + r*n + b."""

    splitting: SplittingData
    algebra: FiniteCdga
    n: int

    def s_index(self, b: int, r: int) -> int:
        return self.n + r * self.n + b

    def split(self, idx: int) -> Tuple[int, Optional[int]]:
        if idx < self.n:
            return idx, None
        q, b = divmod(idx - self.n, self.n)
        return b, q

    def t(self, r: int) -> GradedElement:
        return GradedElement(self.algebra, {self.s_index(self.splitting.base.unit, r): Fraction(1)})

    def lift(self, x: GradedElement, r: Optional[int] = None) -> GradedElement:
        """A base element x, or x*t_r when r is given."""
        if r is None:
            return GradedElement(self.algebra, dict(x.coeffs))
        return GradedElement(self.algebra, {self.s_index(b, r): c for b, c in x.coeffs.items()})

    def component(self, x: GradedElement, r: Optional[int]) -> GradedElement:
        base = self.splitting.base
        out = {}
        for idx, c in x.coeffs.items():
            b, q = self.split(idx)
            if q == r:
                out[b] = c
        return GradedElement(base, out)

    def s_part(self) -> Subcomplex:
        return Subcomplex(self.algebra, range(self.n, len(self.algebra.basis)))


def _t_name(bname: str, r: int) -> str:
    return f"t{r}" if bname == "1" else f"{bname}^t{r}"


def sk_algebra(s: SplittingData, name: str = "") -> SkAlgebra:
    base = s.base
    n = len(base.basis)
    k = s.k
    basis = list(base.basis)
    for r in range(k + 1):
        for b in base.basis:
            basis.append(BasisElement(_t_name(b.name, r), b.degree + 1, b.weight - r))
    deg = [b.degree for b in base.basis]
    eta_vecs = {i: s.eta(i).coeffs for i in range(1, k)}

    def lift(vec: SparseVec, r: int, c=1) -> SparseVec:
        return {n + r * n + b: c * v for b, v in vec.items()}

    def tt(s_: int, r: int) -> List[Tuple[int, int, int]]:
        """t_s t_r as (sign, eta index, target r)."""
        if s_ == r:
            return []
        sign = 1
        if s_ > r:
            s_, r, sign = r, s_, -1
        return [(sign, i, r + s_ - i) for i in range(max(s_, 1), r)]

    def rule(i: int, j: int) -> SparseVec:
        if i < n and j < n:
            return base.mult(i, j)
        if i < n:
            r, b = divmod(j - n, n)
            return lift(base.mult(i, b), r)
        if j < n:
            r, b = divmod(i - n, n)
            sign = -1 if deg[j] % 2 else 1
            return lift(base.mult(b, j), r, sign)
        s_, phi = divmod(i - n, n)
        r, psi = divmod(j - n, n)
        prod = base.mult(phi, psi)
        if not prod:
            return {}
        sign = -1 if deg[psi] % 2 else 1
        out: SparseVec = {}
        for sg, ei, target in tt(s_, r):
            term = base.mult_vec(prod, eta_vecs[ei])
            out = axpy(out, sign * sg, lift(term, target))
        return out

    diffs: List[SparseVec] = [dict(base.d_basis(i)) for i in range(n)]
    a_vec = s.a.coeffs
    for r in range(k + 1):
        for b in range(n):
            phi = {b: Fraction(1)}
            top = axpy(base.d_basis(b), -r, base.mult_vec(a_vec, phi)) if r else dict(base.d_basis(b))
            out = lift(top, r)
            for i in range(1, r):
                out = axpy(out, i - r, lift(base.mult_vec(eta_vecs[i], phi), r - i))
            diffs.append(out)
    alg = FiniteCdga(basis, rule, diffs, unit=base.unit, field=base.field,
                     name=name or f"S{k}({base.name})", weighted=base.weighted)
    return SkAlgebra(s, alg, n)


@dataclass
class SkComplex:
    """Omega_W(S_k(L)) realised inside the combined algebra."""

    splitting: SplittingData
    sk: SkAlgebra

    @property
    def algebra(self) -> FiniteCdga:
        return self.sk.algebra

    def complex(self) -> Subcomplex:
        return self.sk.s_part()

    def cohomology(self) -> Cohomology:
        return cohomology(self.complex())


def d_squared_defects(sk: SkAlgebra) -> Dict[str, str]:
    """Basis elements of the S-part where (d^a)^2 does not vanish."""
    alg = sk.algebra
    out = {}
    for idx in range(sk.n, len(alg.basis)):
        dd = alg.apply_d(alg.d_basis(idx))
        if dd:
            out[alg.basis[idx].name] = render_vector(alg, dd)
    return out


def build_sk_complex(s: SplittingData, require_mc: bool = True) -> SkComplex:
    mc = check_maurer_cartan(s)
    if require_mc and not mc.passed:
        raise MaurerCartanFailure("Maurer-Cartan equation fails", mc.failures())
    sk = sk_algebra(s)
    defects = d_squared_defects(sk)
    if defects:
        raise MaurerCartanFailure(f"(d^a)^2 != 0, e.g. at {next(iter(defects))}", defects)
    return SkComplex(s, sk)


# spectral sequence E1 page

@dataclass
class E1Table:
    k: int
    entries: Dict[Tuple[int, int], int]
    oracle: Dict[Tuple[int, int], int]

    @property
    def matches(self) -> bool:
        return self.entries == self.oracle

    def column(self, p: int) -> Dict[int, int]:
        return {q: v for (pp, q), v in sorted(self.entries.items()) if pp == p}

    def to_json(self) -> dict:
        return {"k": self.k, "matches_twisted_cohomology": self.matches,
                "entries": [[p, q, v] for (p, q), v in sorted(self.entries.items())]}


def filtration_E1(sk: SkComplex) -> E1Table:
    """E1^{p,q} = H^{p+q-1}(W, L^{-p}) from the diagonal blocks of d^a (p = 0..-k)."""
    s = sk.splitting
    alg = sk.algebra
    n = sk.sk.n
    entries: Dict[Tuple[int, int], int] = {}
    oracle: Dict[Tuple[int, int], int] = {}
    for r in range(s.k + 1):
        lo = n + r * n
        idxs = list(range(lo, lo + n))
        local = {g: l for l, g in enumerate(idxs)}
        diffs = []
        for g in idxs:
            diffs.append({local[i]: c for i, c in alg.d_basis(g).items() if i in local})
        graded = ExplicitComplex([alg.basis[g] for g in idxs], diffs)
        dims = cohomology(graded).dims
        twisted = cohomology(s.twisted(r)).dims
        p = -r
        top = s.base.max_degree + 1
        for total in range(0, top + 1):
            q = total - p
            entries[(p, q)] = dims[total] if total < len(dims) else 0
            m = p + q - 1
            oracle[(p, q)] = twisted[m] if 0 <= m < len(twisted) else 0
    return E1Table(s.k, entries, oracle)


# restriction to W and the Gysin sequence

@dataclass
class GysinReport:
    complex: ExplicitComplex
    dims: Tuple[int, ...]
    predicted: Tuple[int, ...]
    extension: GradedElement
    connecting_ranks: Dict[int, int]

    @property
    def holds(self) -> bool:
        return self.dims == self.predicted

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "predicted_from_exact_sequence": list(self.predicted),
                "identity_holds": self.holds, "extension_class": str(self.extension),
                "connecting_ranks": {str(j): v for j, v in sorted(self.connecting_ranks.items())}}


def restricted_complex(s: SplittingData) -> GysinReport:
    """Omega_W (+) Omega_W(L^k)[-1], differential from d^a followed by the restriction map."""
    skc = build_sk_complex(s)
    sk = skc.sk
    alg = sk.algebra
    base = s.base
    n, k = sk.n, s.k
    basis = list(base.basis) + [BasisElement(_t_name(b.name, k), b.degree + 1, b.weight - k)
                                for b in base.basis]
    eta_vecs = {r: s.eta(r).coeffs for r in range(1, k)}

    def restrict(vec: SparseVec) -> SparseVec:
        """phi_r t_r -> phi_r ^ eta_r on 1 <= r <= k-1; keeps base and t_k parts."""
        out: SparseVec = {}
        for idx, c in vec.items():
            b, r = sk.split(idx)
            if r is None:
                out = axpy(out, c, {b: 1})
            elif r == k:
                out = axpy(out, c, {n + b: 1})
            elif r >= 1:
                out = axpy(out, c, base.mult_vec({b: Fraction(1)}, eta_vecs[r]))
        return out

    diffs = [dict(base.d_basis(i)) for i in range(n)]
    for b in range(n):
        diffs.append(restrict(alg.d_basis(sk.s_index(b, k))))
    cx = ExplicitComplex(basis, diffs)
    dims = cohomology(cx).dims

    e = extension_form(s)
    hw = cohomology(base)
    hk = cohomology(s.twisted(k))
    top = max(b.degree for b in basis)
    ranks: Dict[int, int] = {}

    def delta_rank(j: int) -> int:
        if j in ranks:
            return ranks[j]
        reps = hk.representatives(j)
        cols = []
        for v in reps:
            img = base.mult_vec(e.coeffs, v)
            cols.append(class_of(img, base).coordinates if img else ())
        width = hw.degrees[j + 2].dim if (j + 2) in hw.degrees else 0
        if not cols or not width:
            ranks[j] = 0
        else:
            mat = Matrix([[col[i] if col else Fraction(0) for col in cols] for i in range(width)], len(cols))
            ranks[j] = rank(mat)
        return ranks[j]

    def hdim(h: Cohomology, j: int) -> int:
        return h.degrees[j].dim if j in h.degrees else 0

    predicted = []
    for i in range(top + 1):
        ker = hdim(hk, i - 1) - delta_rank(i - 1) if i >= 1 else 0
        coker = hdim(hw, i) - (delta_rank(i - 2) if i >= 2 else 0)
        predicted.append(ker + coker)
    while len(predicted) > len(dims) and predicted[-1] == 0:
        predicted.pop()
    dims_t = tuple(dims) + (0,) * (len(predicted) - len(dims))
    return GysinReport(cx, dims_t, tuple(predicted), e, ranks)


# symplectic data

@dataclass
class SymplecticData:
    splitting: SplittingData
    beta: GradedElement
    alphas: Tuple[GradedElement, ...]

    def __post_init__(self):
        self.alphas = tuple(self.alphas)
        if len(self.alphas) != self.splitting.k + 1:
            raise ModelError(f"need alpha_0..alpha_k ({self.splitting.k + 1} forms)")


def gamma_form(sd: SymplecticData) -> GradedElement:
    s = sd.splitting
    g = sd.beta
    for r in range(1, s.k):
        g = g + (sd.alphas[r] ^ s.eta(r))
    return g


@dataclass
class SymplecticReport:
    closure: Dict[int, GradedElement]
    beta_closed: bool
    closed_in_sk: bool
    gamma: GradedElement
    alpha_top_nonvanishing: Optional[bool]
    pairing: Optional[Matrix]
    nondegenerate: Optional[bool]

    @property
    def closure_ok(self) -> bool:
        return all(v.is_zero() for v in self.closure.values())

    @property
    def passed(self) -> bool:
        return self.closure_ok and self.beta_closed and bool(self.alpha_top_nonvanishing) and bool(self.nondegenerate)

    @property
    def status(self) -> str:
        if not (self.closure_ok and self.beta_closed):
            return "closure-failed"
        if self.nondegenerate is None:
            return "undecidable"
        return "pass" if self.passed else "degenerate"

    def to_json(self) -> dict:
        return {"status": self.status, "passed": self.passed,
                "closure_residuals": {str(p): str(v) for p, v in self.closure.items()},
                "beta_closed": self.beta_closed, "closed_in_sk_algebra": self.closed_in_sk,
                "gamma": str(self.gamma),
                "alpha_top_nonvanishing": self.alpha_top_nonvanishing,
                "pairing_matrix": None if self.pairing is None else [[str(x) for x in r] for r in self.pairing.tolist()],
                "nondegenerate": self.nondegenerate}


def coframe_coordinates(x: GradedElement) -> List:
    """Coefficients of a 1-form on the declared coframe."""
    m = x.model
    frame = [m.index(c) for c in m.coframe]
    if set(x.coeffs) - set(frame):
        raise ModelError(f"{x} is not a constant combination of the coframe")
    return [x.coeffs.get(i, Fraction(0)) for i in frame]


def coframe_pairing(x: GradedElement) -> Matrix:
    """Antisymmetric matrix G with x = sum_{i<j} G_ij theta_i ^ theta_j."""
    m = x.model
    frame = [m.index(c) for c in m.coframe]
    pairs = [(i, j) for i in range(len(frame)) for j in range(i + 1, len(frame))]
    cols = [m.mult_vec({frame[i]: Fraction(1)}, {frame[j]: Fraction(1)}) for i, j in pairs]
    sol = solve_sparse_columns(cols, x.coeffs)
    if sol is None:
        raise ModelError(f"{x} is not a constant 2-form on the coframe")
    size = len(frame)
    G = [[Fraction(0)] * size for _ in range(size)]
    for col, (i, j) in enumerate(pairs):
        c = sol.get(col, Fraction(0))
        G[i][j] = c
        G[j][i] = -c
    return Matrix(G, size)


def check_symplectic_data(sd: SymplecticData) -> SymplecticReport:
    s = sd.splitting
    k = s.k
    closure = {}
    for p in range(k + 1):
        rhs = s.base.zero()
        for r in range(p + 1, k + 1):
            rhs = rhs + (s.eta(r - p) ^ sd.alphas[r])
        closure[p] = twisted_d(s, sd.alphas[p], p) - rhs * p
    beta_closed = sd.beta.d().is_zero()

    sk = sk_algebra(s)
    omega = sk.lift(sd.beta)
    for r, al in enumerate(sd.alphas):
        omega = omega + sk.lift(al, r)
    closed_in_sk = omega.d().is_zero()

    gamma = gamma_form(sd)
    if not s.base.coframe:
        return SymplecticReport(closure, beta_closed, closed_in_sk, gamma, None, None, None)
    top = coframe_coordinates(sd.alphas[k])
    nonvanishing = any(top)
    G = coframe_pairing(gamma)
    if not nonvanishing:
        return SymplecticReport(closure, beta_closed, closed_in_sk, gamma, False, None, False)
    kernel = solve_linear(Matrix([top], len(top))).kernel
    B = Matrix([[v[i] for v in kernel] for i in range(len(top))], len(kernel))
    pairing = B.transpose() @ G @ B
    nondeg = pairing.rows == 0 or determinant(pairing) != 0
    return SymplecticReport(closure, beta_closed, closed_in_sk, gamma, True, pairing, nondeg)


@dataclass
class VariationResult:
    quotient: FiniteCdga
    foliated_form: GradedElement
    foliated_class: ClassResult
    variation: GradedElement
    variation_class: ClassResult

    @property
    def nonzero(self) -> bool:
        return not self.variation_class.exact

    def to_json(self) -> dict:
        return {"foliated_form": str(self.foliated_form), "foliated_form_nonzero": not self.foliated_class.exact,
                "variation": str(self.variation), "variation_nonzero": self.nonzero,
                "quotient_basis": [b.name for b in self.quotient.basis]}


def symplectic_variation(sd: SymplecticData) -> VariationResult:
    s = sd.splitting
    report = check_symplectic_data(sd)
    if not (report.closure_ok and report.beta_closed):
        raise ModelError("symplectic data fails its closure equations")
    q = quotient_by_ideal(s.base, sd.alphas[s.k])
    omega_f = q.project(report.gamma)
    var = q.project(-extension_form(s))
    a_bar = q.project(s.a)
    fol_class = class_of(omega_f, q.model)
    var_class = class_of(var, TwistedComplex(q.model, -s.k, a_bar))
    return VariationResult(q.model, omega_f, fol_class, var, var_class)


# the deformation family sigma(s)

@dataclass
class DeformedData:
    scale: Fraction
    splitting: SplittingData
    extension: GradedElement
    foliated_form: Optional[GradedElement]

    def to_json(self) -> dict:
        return {"scale": str(self.scale), "etas": [str(e) for e in self.splitting.etas],
                "extension_form": str(self.extension),
                "foliated_form": None if self.foliated_form is None else str(self.foliated_form)}


def deform_family(s: SplittingData, scale, base_form: Optional[GradedElement] = None) -> DeformedData:
    """eta_i -> scale^i eta_i; omega_F(s) = B - s^k sum_r r eta_{k-r} ^ eta_r."""
    c = Fraction(scale)
    etas = tuple(e * c ** (i + 1) for i, e in enumerate(s.etas))
    new = SplittingData(s.base, s.a, s.k, etas)
    e = extension_form(new)
    fol = None
    if base_form is not None:
        fol = base_form - extension_form_weighted(s) * c ** s.k
    return DeformedData(c, new, e, fol)


@dataclass
class HomogeneityReport:
    k: int
    samples: Tuple[Fraction, ...]
    extension_ok: bool
    mc_ok: bool

    @property
    def holds(self) -> bool:
        return self.extension_ok and self.mc_ok


def verify_homogeneity(s: SplittingData) -> HomogeneityReport:
    """e(sigma(s)) = s^k e(sigma) and MC_r(sigma(s)) = s^r MC_r(sigma) as polynomial identities.

    Both sides are polynomials in s of degree <= 2(k-1); agreement at 2k-1 distinct
    points forces equality of polynomials.
    """
    k = s.k
    samples = tuple(Fraction(x) for x in range(-(k - 1), k))
    e0 = extension_form(s)
    mc0 = check_maurer_cartan(s).residuals
    ext_ok = mc_ok = True
    for c in samples:
        d = deform_family(s, c)
        if d.extension != e0 * c ** k:
            ext_ok = False
        res = check_maurer_cartan(d.splitting).residuals
        for r in range(1, k):
            if res[r] != mc0[r] * c ** r:
                mc_ok = False
    return HomogeneityReport(k, samples, ext_ok, mc_ok)
