"""Builtin models: each yields a cdga plus optional splitting and symplectic data."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from .cdga import BasisElement, FiniteCdga, ModelError, exterior_algebra
from .mc import SplittingData, SymplecticData
from .universal import build_c_theta, build_ce, ce_splitting, universal_symplectic


@dataclass
class Builtin:
    name: str
    model: FiniteCdga
    splitting: Optional[SplittingData] = None
    symplectic: Optional[SymplecticData] = None
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def order(self) -> Optional[int]:
        """Algebroid order k+1 of the splitting."""
        return None if self.splitting is None else self.splitting.k + 1


def surface_ring(g: int) -> FiniteCdga:
    """Cohomology ring of a genus-g surface with zero differential."""
    if g < 1:
        raise ModelError("genus must be at least 1")
    basis = [BasisElement("1", 0)]
    basis += [BasisElement(f"alpha{i}", 1) for i in range(1, g + 1)]
    basis += [BasisElement(f"beta{i}", 1) for i in range(1, g + 1)]
    basis.append(BasisElement("omega", 2))
    top = len(basis) - 1
    table = {}
    for i in range(len(basis)):
        table[(0, i)] = {i: 1}
        table[(i, 0)] = {i: 1}
    for i in range(1, g + 1):
        table[(i, g + i)] = {top: 1}
        table[(g + i, i)] = {top: -1}
    return FiniteCdga(basis, table, [{} for _ in basis], name=f"H(S_{g})")


def genus_g(g: int = 1, params: Optional[Sequence[Sequence]] = None) -> Builtin:
    """Order-4 data eta_1 = sum x_i alpha_i + y_i beta_i, eta_2 = sum w_i alpha_i + z_i beta_i.

    ``params`` is a list of g tuples (x_i, y_i, w_i, z_i); default (1, 0, 0, 1) each.
    """
    model = surface_ring(g)
    params = [tuple(Fraction(v) for v in p) for p in (params or [(1, 0, 0, 1)] * g)]
    if len(params) != g or any(len(p) != 4 for p in params):
        raise ModelError(f"need {g} parameter tuples (x, y, w, z)")
    eta1 = model.element({f"alpha{i + 1}": p[0] for i, p in enumerate(params)}) + \
        model.element({f"beta{i + 1}": p[1] for i, p in enumerate(params)})
    eta2 = model.element({f"alpha{i + 1}": p[2] for i, p in enumerate(params)}) + \
        model.element({f"beta{i + 1}": p[3] for i, p in enumerate(params)})
    s = SplittingData(model, model.zero(), 3, (eta1, eta2))
    return Builtin("genus-g", model, s, notes={"g": str(g)})


def heisenberg_model() -> FiniteCdga:
    return exterior_algebra([("a", 0), ("b", 0), ("c", 0)], {"c": {("a", "b"): 1}},
                            coframe=True, name="heisenberg")


def heisenberg() -> Builtin:
    """Order-5 data eta = (a, b, -c) with trivial connection."""
    m = heisenberg_model()
    a, b, c = (m.basis_element(x) for x in "abc")
    return Builtin("heisenberg", m, SplittingData(m, m.zero(), 4, (a, b, -c)))


def cat_torus_model(lam=1) -> FiniteCdga:
    """Invariant forms on the cat-map mapping torus; lam stands for log of the eigenvalue."""
    lam = Fraction(lam)
    if not lam:
        raise ModelError("lambda must be nonzero")
    gens = [("alpha", 0), ("a1", 0), ("b1", 0), ("a2", 0), ("b2", 0)]
    diff = {"a1": {("alpha", "a1"): -lam}, "b1": {("alpha", "b1"): lam},
            "a2": {("alpha", "a2"): -2 * lam}, "b2": {("alpha", "b2"): 2 * lam}}
    return exterior_algebra(gens, diff, coframe=True, name="cat-torus")


def cat_torus(lam=1) -> Builtin:
    """Order-4 splitting a = lam*alpha, eta = (a1, a2) with symplectic data from -d(t3)."""
    m = cat_torus_model(lam)
    lam = Fraction(lam)
    al, a1, b1, a2, b2 = (m.basis_element(x) for x in ("alpha", "a1", "b1", "a2", "b2"))
    s = SplittingData(m, al * lam, 3, (a1, a2))
    beta = (a1 ^ b1) + (a2 ^ b2)
    sd = SymplecticData(s, beta, (m.zero(), a2, a1 * 2, al * (3 * lam)))
    return Builtin("cat-torus", m, s, sd, notes={"lambda": str(lam)})


def universal_u(k: int = 4) -> Builtin:
    """CE(k_k) (+) C(theta) for the universal order-(k+1) algebroid."""
    sk = build_c_theta(k)
    return Builtin(f"universal-U{k}", sk.algebra, sk.splitting, notes={"k": str(k)})


def universal_e_odd(n: int = 1) -> Builtin:
    """CE(g_{2n+1}) with the tautological splitting and varpi = dt_{2n+1}."""
    u = universal_symplectic(n)
    return Builtin(f"universal-E{2 * n + 1}", u.data.splitting.base, u.data.splitting, u.data,
                   notes={"n": str(n)})


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    description: str
    build: Callable[..., Builtin]


REGISTRY: Dict[str, RegistryEntry] = {e.name: e for e in [
    RegistryEntry("genus-g", "cohomology ring of a genus-g surface with closed order-4 data (eta_1, eta_2)", genus_g),
    RegistryEntry("heisenberg", "Heisenberg nilmanifold model, order-5 data eta = (a, b, -c)", heisenberg),
    RegistryEntry("cat-torus", "cat-map mapping torus invariant forms, order-4 data and symplectic data", cat_torus),
    RegistryEntry("universal-Uk", "CE(k_k) (+) C(theta), default k = 4 (name universal-U<k>)", universal_u),
    RegistryEntry("universal-E-odd", "CE(g_{2n+1}) with varpi = dt_{2n+1}, default n = 1 (name universal-E<2n+1>)",
                  universal_e_odd),
]}


def load_builtin(name: str, **params) -> Builtin:
    """Look up a builtin; universal-U<k> and universal-E<2n+1> carry their parameter in the name."""
    if name in REGISTRY:
        return REGISTRY[name].build(**params)
    if name.startswith("universal-U") and name[11:].isdigit():
        return universal_u(int(name[11:]))
    if name.startswith("universal-E") and name[11:].isdigit():
        m = int(name[11:])
        if m % 2 == 0:
            raise ModelError("universal-E needs an odd order 2n+1")
        return universal_e_odd((m - 1) // 2)
    raise ModelError(f"unknown model {name!r}; known: {', '.join(sorted(REGISTRY))}")


def builtin_names() -> List[str]:
    return sorted(REGISTRY)
