"""Builders for the Chevalley-Eilenberg algebras of jet Lie algebras and the universal S_k models."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .cdga import (FiniteCdga, GradedElement, ModelError, TwistedComplex, cohomology, exterior_algebra,
                   weight_subcomplex)
from .linalg import Matrix, determinant
from .mc import (SkAlgebra, SplittingData, SymplecticData, SymplecticReport, VariationResult,
                 check_symplectic_data, coframe_pairing, extension_form, sk_algebra, symplectic_variation)


def _gen(i: int) -> str:
    return f"x{i}"


def build_ce(k: int, variant: str = "g") -> FiniteCdga:
    """CE(g_k) on x0..x_{k-1}, or CE(k_k) on x1..x_{k-1} (variant "k"); x_i has weight -i.

    dx_r = sum_{i=1}^{r} i x_i ^ x_{r-i}, with x0 terms dropped for k_k.
    """
    if k < 1:
        raise ModelError("order k must be at least 1")
    if variant not in ("g", "k"):
        raise ModelError(f"unknown variant {variant!r}, expected 'g' or 'k'")
    lo = 0 if variant == "g" else 1
    gens = [(_gen(i), -i) for i in range(lo, k)]
    diff: Dict[str, Dict[Tuple[str, ...], int]] = {}
    for r in range(lo, k):
        terms: Dict[Tuple[str, ...], int] = {}
        for i in range(1, r + 1):
            if r - i < lo:
                continue
            key = (_gen(i), _gen(r - i))
            terms[key] = terms.get(key, 0) + i
        diff[_gen(r)] = terms
    return exterior_algebra(gens, diff, coframe=True, name=f"CE({variant}{k})", weighted=True)


def ce_splitting(base: FiniteCdga, k: int, with_connection: bool) -> SplittingData:
    """The tautological splitting a = x0 (or 0), eta_i = x_i."""
    a = base.basis_element(_gen(0)) if with_connection else base.zero()
    etas = tuple(base.basis_element(_gen(i)) for i in range(1, k))
    return SplittingData(base, a, k, etas)


def build_u_lambda(k: int, lam: int) -> TwistedComplex:
    """CE(g_k, U_lambda): differential d + lambda * x0 ^ -."""
    base = build_ce(k, "g")
    return TwistedComplex(base, -lam, base.basis_element(_gen(0)))


def contraction_x0(model: FiniteCdga, i: int) -> Dict[int, Fraction]:
    """Interior product with the dual of x0, as a degree -1 derivation."""
    x0 = model.index(_gen(0))
    for r in range(len(model.basis)):
        p = model.mult(x0, r)
        if p.get(i):
            return {r: 1 / p[i]}
    return {}


def homotopy_defects(k: int, lam: int) -> List[str]:
    """Basis elements f where [d, iota](f u) != (weight(f) + lambda) f u."""
    cx = build_u_lambda(k, lam)
    base = cx.base
    bad = []
    for i, b in enumerate(base.basis):
        lhs: Dict[int, Fraction] = {}
        for j, c in contraction_x0(base, i).items():
            for r, v in cx.d_basis(j).items():
                lhs[r] = lhs.get(r, 0) + c * v
        for j, c in cx.d_basis(i).items():
            for r, v in contraction_x0(base, j).items():
                lhs[r] = lhs.get(r, 0) + c * v
        lhs = {r: v for r, v in lhs.items() if v}
        w = b.weight + lam
        if lhs != ({i: Fraction(w)} if w else {}):
            bad.append(b.name)
    return bad


def lemma_dims(k: int, lam: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(dims H(CE(g_k, U_lambda)), dims H(R[x0] (x) CE(k_k)_{-lambda}))."""
    direct = cohomology(build_u_lambda(k, lam)).dims
    sub = cohomology(weight_subcomplex(build_ce(k, "k"), -lam)).dims
    top = max(len(direct), len(sub) + 1)
    predicted = [0] * top
    for n, h in enumerate(sub):
        predicted[n] += h
        predicted[n + 1] += h
    direct = tuple(direct) + (0,) * (top - len(direct))
    while predicted and predicted[-1] == 0 and direct and direct[-1] == 0:
        predicted.pop()
        direct = direct[:-1]
    return direct, tuple(predicted)


def build_sk(k: int) -> SkAlgebra:
    """CE(g_k) (+) S_k with dt_r = sum_{i<r} (i-r) x_i t_{r-i}."""
    base = build_ce(k, "g")
    return sk_algebra(ce_splitting(base, k, True), name=f"CE(g{k})+S{k}")


def build_c_theta(k: int) -> SkAlgebra:
    """CE(k_k) (+) C(theta): the x0 = 0 specialization of build_sk."""
    base = build_ce(k, "k")
    return sk_algebra(ce_splitting(base, k, False), name=f"CE(k{k})+C(theta{k})")


def primed_t0(sk: SkAlgebra) -> GradedElement:
    """t0' = t0 + x0 in the combined algebra."""
    alg = sk.algebra
    return sk.t(0) + GradedElement(alg, {sk.splitting.base.index(_gen(0)): Fraction(1)})


@dataclass
class UniversalSymplectic:
    n: int
    sk: SkAlgebra
    data: SymplecticData
    varpi: GradedElement
    gamma: GradedElement
    alpha_top: GradedElement
    pairing: Matrix
    report: SymplecticReport

    @property
    def nondegenerate(self) -> bool:
        return self.pairing.rows == 0 or determinant(self.pairing) != 0

    def variation(self) -> VariationResult:
        return symplectic_variation(self.data)

    def to_json(self) -> dict:
        return {"n": self.n, "varpi": str(self.varpi), "gamma": str(self.gamma),
                "alpha_top": str(self.alpha_top),
                "pairing_matrix": [[str(x) for x in r] for r in self.pairing.tolist()],
                "determinant": str(determinant(self.pairing)) if self.pairing.rows else "1",
                "nondegenerate": self.nondegenerate, "check": self.report.to_json()}


def universal_symplectic(n: int) -> UniversalSymplectic:
    """varpi = dt_{2n+1} in S_{2n+1}, decomposed as beta = 0 and alpha_r = -r x_{k-r}."""
    if n < 0:
        raise ModelError("n must be non-negative")
    k = 2 * n + 1
    sk = build_sk(k)
    s = sk.splitting
    base = s.base
    varpi = sk.t(k).d()
    alphas = tuple(sk.component(varpi, r) for r in range(k + 1))
    data = SymplecticData(s, base.zero() + sk.component(varpi, None), alphas)
    report = check_symplectic_data(data)
    G = coframe_pairing(report.gamma)
    keep = [base.coframe.index(_gen(i)) for i in range(1, k)]
    pairing = Matrix([[G[i, j] for j in keep] for i in keep], len(keep))
    return UniversalSymplectic(n, sk, data, varpi, report.gamma, alphas[k], pairing, report)


def universal_extension(k: int) -> GradedElement:
    """e(U_k) in CE(k_k)."""
    base = build_ce(k, "k")
    return extension_form(ce_splitting(base, k, False))
