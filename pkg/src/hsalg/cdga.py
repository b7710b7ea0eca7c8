"""Finite graded-commutative differential algebras and their cohomology.

Elements are sparse coefficient dicts over a fixed basis.  A model is given by
its basis, a product rule (a table or a callable producing table rows on demand)
and the differential of every basis element.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .linalg import Echelon, Matrix, SparseVec, axpy, kernel_from_echelon, solve_sparse_columns
from .scalars import QuadScalar, format_rational, from_json as scalar_from_json, to_json as scalar_to_json

ProductRule = Callable[[int, int], SparseVec]


class ModelError(ValueError):
    pass


class NotHomogeneous(ModelError):
    pass


class NotClosed(ModelError):
    pass


class IdealNotStable(ModelError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    weight: int = 0


def _vec_add(u: SparseVec, v: SparseVec, c=1) -> SparseVec:
    return axpy(u, c, v)


def _vec_scale(u: SparseVec, c) -> SparseVec:
    if not c:
        return {}
    return {i: c * x for i, x in u.items()}


class CochainComplex:
    """A finite cochain complex with a graded basis."""

    basis: Tuple[BasisElement, ...]

    def __init__(self, basis: Sequence[BasisElement]):
        self.basis = tuple(basis)
        self._index = {b.name: i for i, b in enumerate(self.basis)}
        if len(self._index) != len(self.basis):
            raise ModelError("basis names must be unique")
        self._by_degree: Dict[int, List[int]] = {}
        for i, b in enumerate(self.basis):
            if b.degree < 0:
                raise ModelError(f"negative degree for {b.name}")
            self._by_degree.setdefault(b.degree, []).append(i)
        self._cohomology_cache = None

    # structure

    def d_basis(self, i: int) -> SparseVec:
        raise NotImplementedError

    def __len__(self):
        return len(self.basis)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ModelError(f"unknown basis element {name!r}") from None

    def indices_in_degree(self, n: int) -> List[int]:
        return list(self._by_degree.get(n, []))

    @property
    def max_degree(self) -> int:
        return max(self._by_degree, default=0)

    def degree_of(self, vec: SparseVec) -> Optional[int]:
        degs = {self.basis[i].degree for i in vec}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else None

    def apply_d(self, vec: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, c in vec.items():
            out = axpy(out, c, self.d_basis(i))
        return out

    def d_matrix(self, n: int) -> Matrix:
        """Matrix of d: C^n -> C^(n+1) in the degree-ordered bases."""
        src = self.indices_in_degree(n)
        dst = self.indices_in_degree(n + 1)
        pos = {g: r for r, g in enumerate(dst)}
        data = [[Fraction(0)] * len(src) for _ in dst]
        for c, g in enumerate(src):
            for i, v in self.d_basis(g).items():
                data[pos[i]][c] = v
        return Matrix(data, len(src))


class ExplicitComplex(CochainComplex):
    def __init__(self, basis: Sequence[BasisElement], diffs: Sequence[SparseVec]):
        super().__init__(basis)
        if len(diffs) != len(self.basis):
            raise ModelError("need one differential per basis element")
        self._diffs = tuple({i: c for i, c in d.items() if c} for d in diffs)

    def d_basis(self, i: int) -> SparseVec:
        return self._diffs[i]


class Subcomplex(CochainComplex):
    """The span of some basis elements of a complex, assumed d-stable (checked)."""

    def __init__(self, parent: CochainComplex, indices: Sequence[int]):
        indices = list(indices)
        super().__init__([parent.basis[i] for i in indices])
        self.parent = parent
        self.parent_indices = indices
        self._local = {g: l for l, g in enumerate(indices)}
        diffs = []
        for g in indices:
            d = parent.d_basis(g)
            out = {}
            for i, c in d.items():
                if i not in self._local:
                    raise ModelError(f"span is not d-stable: d({parent.basis[g].name}) leaves it")
                out[self._local[i]] = c
            diffs.append(out)
        self._diffs = diffs

    def d_basis(self, i: int) -> SparseVec:
        return self._diffs[i]

    def to_local(self, vec: SparseVec) -> SparseVec:
        return {self._local[i]: c for i, c in vec.items()}

    def to_parent(self, vec: SparseVec) -> SparseVec:
        return {self.parent_indices[i]: c for i, c in vec.items()}


class FiniteCdga(CochainComplex):
    def __init__(self, basis: Sequence[BasisElement], product: Union[ProductRule, Mapping[Tuple[int, int], SparseVec]],
                 differential: Sequence[SparseVec], unit: int = 0, field: int = 0,
                 coframe: Optional[Sequence[str]] = None, name: str = "", weighted: bool = False):
        super().__init__(basis)
        if len(differential) != len(self.basis):
            raise ModelError("need one differential entry per basis element")
        self._diff = tuple({i: c for i, c in d.items() if c} for d in differential)
        if callable(product):
            self._rule = product
            self._table: Dict[Tuple[int, int], SparseVec] = {}
        else:
            table = {}
            for (i, j), v in product.items():
                v = {r: c for r, c in v.items() if c}
                if v:
                    table[(i, j)] = v
            self._rule = None
            self._table = table
        self.unit = unit
        self.field = field
        self.coframe = tuple(coframe) if coframe else None
        self.name = name
        self.weighted = weighted

    def d_basis(self, i: int) -> SparseVec:
        return self._diff[i]

    def mult(self, i: int, j: int) -> SparseVec:
        key = (i, j)
        if self._rule is None:
            return self._table.get(key, {})
        hit = self._table.get(key)
        if hit is None:
            hit = {r: c for r, c in self._rule(i, j).items() if c}
            self._table[key] = hit
        return hit

    def mult_vec(self, u: SparseVec, v: SparseVec) -> SparseVec:
        out: SparseVec = {}
        maxdeg = self.max_degree
        for i, a in u.items():
            di = self.basis[i].degree
            for j, b in v.items():
                if di + self.basis[j].degree > maxdeg:
                    continue
                p = self.mult(i, j)
                if p:
                    out = axpy(out, a * b, p)
        return out

    # elements

    def element(self, spec=None) -> GradedElement:
        """Build an element from a name, a {name: coeff} mapping, or an expression string."""
        if spec is None:
            return GradedElement(self, {})
        if isinstance(spec, GradedElement):
            return spec
        if isinstance(spec, str):
            return parse_element(self, spec)
        if isinstance(spec, Mapping):
            vec: SparseVec = {}
            for k, c in spec.items():
                idx = k if isinstance(k, int) else self.index(k)
                c = c if isinstance(c, (Fraction, QuadScalar)) else Fraction(c)
                vec = axpy(vec, c, {idx: Fraction(1)})
            return GradedElement(self, vec)
        raise TypeError(f"cannot build an element from {spec!r}")

    def basis_element(self, name: str) -> GradedElement:
        return GradedElement(self, {self.index(name): Fraction(1)})

    def one(self) -> GradedElement:
        return GradedElement(self, {self.unit: Fraction(1)})

    def zero(self) -> GradedElement:
        return GradedElement(self, {})

    def full_table(self) -> Dict[Tuple[int, int], SparseVec]:
        n = len(self.basis)
        maxdeg = self.max_degree
        out = {}
        for i in range(n):
            for j in range(n):
                if self.basis[i].degree + self.basis[j].degree > maxdeg:
                    continue
                p = self.mult(i, j)
                if p:
                    out[(i, j)] = p
        return out


class GradedElement:
    """An exact vector over the basis of a model."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model: FiniteCdga, coeffs: SparseVec):
        self.model = model
        self.coeffs = {i: c for i, c in coeffs.items() if c}

    def _same(self, other: GradedElement):
        if not isinstance(other, GradedElement) or other.model is not self.model:
            raise ModelError("elements live in different models")

    @property
    def degree(self) -> Optional[int]:
        return self.model.degree_of(self.coeffs)

    def require_degree(self) -> int:
        if not self.coeffs:
            raise NotHomogeneous("the zero element has no definite degree")
        deg = self.degree
        if deg is None:
            raise NotHomogeneous(f"mixed-degree element {self}")
        return deg

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        self._same(other)
        return GradedElement(self.model, axpy(self.coeffs, 1, other.coeffs))

    def __sub__(self, other):
        self._same(other)
        return GradedElement(self.model, axpy(self.coeffs, -1, other.coeffs))

    def __neg__(self):
        return GradedElement(self.model, _vec_scale(self.coeffs, -1))

    def __mul__(self, c):
        if isinstance(c, GradedElement):
            raise TypeError("use ^ for the wedge product")
        c = Fraction(c) if isinstance(c, int) else c
        return GradedElement(self.model, _vec_scale(self.coeffs, c))

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def d(self) -> GradedElement:
        return GradedElement(self.model, self.model.apply_d(self.coeffs))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.model is other.model and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0])))

    def coefficient(self, name: str):
        return self.coeffs.get(self.model.index(name), Fraction(0))

    def __repr__(self):
        return f"GradedElement({self})"

    def __str__(self):
        return render_vector(self.model, self.coeffs)

    def to_json(self) -> dict:
        return {self.model.basis[i].name: scalar_to_json(c) for i, c in sorted(self.coeffs.items())}


def render_vector(complex_: CochainComplex, vec: SparseVec) -> str:
    if not vec:
        return "0"
    parts = []
    for i in sorted(vec):
        c = vec[i]
        name = complex_.basis[i].name
        if isinstance(c, QuadScalar) and c.b:
            cs = f"({c})"
        else:
            cs = str(c) if isinstance(c, QuadScalar) else format_rational(c)
        if name == "1":
            s = cs
        elif cs == "1":
            s = name
        elif cs == "-1":
            s = "-" + name
        else:
            s = f"{cs}*{name}"
        parts.append(s)
    out = parts[0]
    for p in parts[1:]:
        out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
    return out


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*)?(.+)$")


def parse_element(model: FiniteCdga, text: str) -> GradedElement:
    """Parse ``-2*a^c + 1/2*x2^t3`` style expressions (a bare number is a multiple of 1)."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return model.zero()
    terms, cur = [], ""
    for ch in s:
        if ch in "+-" and cur:
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    vec: SparseVec = {}
    for t in terms:
        sign = 1
        while t and t[0] in "+-":
            sign = -sign if t[0] == "-" else sign
            t = t[1:]
        if re.fullmatch(r"\d+(?:/\d+)?", t):
            vec = axpy(vec, sign * Fraction(t), {model.unit: Fraction(1)})
            continue
        m = _TERM.match(t)
        if not m:
            raise ModelError(f"cannot parse term {t!r}")
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        vec = axpy(vec, sign * coeff, {model.index(m.group(2)): Fraction(1)})
    return GradedElement(model, vec)


def wedge(x: GradedElement, y: GradedElement) -> GradedElement:
    x._same(y)
    return GradedElement(x.model, x.model.mult_vec(x.coeffs, y.coeffs))


# builders for free exterior algebras on odd generators

def _merge_sign(m1: Tuple[int, ...], m2: Tuple[int, ...]) -> int:
    inversions = 0
    for x in m1:
        for y in m2:
            if x > y:
                inversions += 1
            elif x == y:
                return 0
    return -1 if inversions % 2 else 1


def exterior_algebra(generators: Sequence[Tuple[str, int]], differential: Mapping[str, Mapping[Tuple[str, ...], object]]
                     = None, coframe: bool = False, name: str = "", field: int = 0,
                     weighted: bool = False) -> FiniteCdga:
    """Exterior algebra on degree-1 generators.

    ``generators`` lists (name, weight).  ``differential`` maps a generator name to
    {(g1, g2): coeff}, meaning d(gen) = sum coeff * g1^g2 (any tuple length allowed).
    Basis: square-free monomials ordered by degree, then lexicographically.
    """
    differential = differential or {}
    names = [g for g, _ in generators]
    weights = [w for _, w in generators]
    n = len(names)
    monos: List[Tuple[int, ...]] = []
    for deg in range(n + 1):
        monos.extend(combinations(range(n), deg))
    mono_index = {m: i for i, m in enumerate(monos)}
    basis = [BasisElement("1" if not m else "^".join(names[i] for i in m), len(m), sum(weights[i] for i in m))
             for m in monos]

    def rule(i: int, j: int) -> SparseVec:
        m1, m2 = monos[i], monos[j]
        s = _merge_sign(m1, m2)
        if not s:
            return {}
        return {mono_index[tuple(sorted(m1 + m2))]: Fraction(s)}

    gen_d: List[SparseVec] = []
    for g in names:
        vec: SparseVec = {}
        for mono, c in differential.get(g, {}).items():
            idx = [names.index(x) for x in mono]
            cur = {mono_index[()]: Fraction(1)}
            for t in idx:
                nxt: SparseVec = {}
                for key, val in cur.items():
                    for r, cc in rule(key, mono_index[(t,)]).items():
                        nxt = axpy(nxt, val * cc, {r: 1})
                cur = nxt
            vec = axpy(vec, c if isinstance(c, (Fraction, QuadScalar)) else Fraction(c), cur)
        gen_d.append(vec)

    def mult_vec(u, v):
        out = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for r, c in rule(a, b).items():
                    out = axpy(out, ca * cb * c, {r: 1})
        return out

    diffs: List[SparseVec] = []
    for m in monos:
        total: SparseVec = {}
        for pos, g in enumerate(m):
            prefix = {mono_index[m[:pos]]: Fraction(1)}
            suffix = {mono_index[m[pos + 1:]]: Fraction(1)}
            term = mult_vec(mult_vec(prefix, gen_d[g]), suffix)
            total = axpy(total, -1 if pos % 2 else 1, term)
        diffs.append(total)
    return FiniteCdga(basis, rule, diffs, unit=0, field=field,
                      coframe=names if coframe else None, name=name, weighted=weighted)


# twisted complexes

class TwistedComplex(CochainComplex):
    """The base model with differential d_w = d - w * (a ^ -)."""

    def __init__(self, base: FiniteCdga, weight: int, connection: Optional[GradedElement] = None):
        super().__init__(base.basis)
        self.base = base
        self.weight = weight
        a = connection if connection is not None else base.zero()
        if a.model is not base:
            raise ModelError("connection form must live in the base model")
        if a.coeffs:
            if a.require_degree() != 1:
                raise NotHomogeneous("connection form must have degree 1")
            if a.d().coeffs:
                raise NotClosed(f"connection form {a} is not closed")
        self.connection = a
        self._diffs: Dict[int, SparseVec] = {}

    def d_basis(self, i: int) -> SparseVec:
        hit = self._diffs.get(i)
        if hit is None:
            hit = dict(self.base.d_basis(i))
            if self.weight and self.connection.coeffs:
                hit = axpy(hit, -self.weight, self.base.mult_vec(self.connection.coeffs, {i: Fraction(1)}))
            self._diffs[i] = hit
        return hit

    def element(self, spec) -> GradedElement:
        return self.base.element(spec)


def weight_subcomplex(model: FiniteCdga, weight: int) -> Subcomplex:
    return Subcomplex(model, [i for i, b in enumerate(model.basis) if b.weight == weight])


# cohomology

@dataclass
class DegreeData:
    degree: int
    dim: int
    representatives: List[SparseVec]
    image: List[SparseVec]
    image_sources: List[int]


@dataclass
class Cohomology:
    complex: CochainComplex
    degrees: Dict[int, DegreeData]

    @property
    def dims(self) -> Tuple[int, ...]:
        top = max(self.degrees, default=-1)
        return tuple(self.degrees[n].dim if n in self.degrees else 0 for n in range(top + 1))

    def representatives(self, n: int) -> List[SparseVec]:
        return list(self.degrees[n].representatives) if n in self.degrees else []

    def rendered(self) -> Dict[int, List[str]]:
        return {n: [render_vector(self.complex, v) for v in dd.representatives] for n, dd in self.degrees.items()}


def _kernel(complex_: CochainComplex, n: int) -> List[SparseVec]:
    src = complex_.indices_in_degree(n)
    rows: Dict[int, SparseVec] = {}
    for local, g in enumerate(src):
        for i, c in complex_.d_basis(g).items():
            rows.setdefault(i, {})[local] = c
    ech = Echelon()
    for i in sorted(rows):
        ech.insert(rows[i])
    return [{src[l]: c for l, c in v.items()} for v in kernel_from_echelon(ech, len(src))]


def cohomology(complex_: CochainComplex) -> Cohomology:
    """Per-degree dimensions and representatives (kernel vectors reduced modulo the image)."""
    cached = getattr(complex_, "_cohomology_cache", None)
    if cached is not None:
        return cached
    degrees: Dict[int, DegreeData] = {}
    top = complex_.max_degree
    for n in range(top + 1):
        prev = complex_.indices_in_degree(n - 1) if n > 0 else []
        image_cols = [complex_.d_basis(g) for g in prev]
        for col in image_cols:
            for i in col:
                if complex_.basis[i].degree != n:
                    raise ModelError("differential does not raise degree by exactly one")
        image_ech = Echelon()
        for col in image_cols:
            image_ech.insert(col)
        combined = Echelon()
        for col in image_cols:
            combined.insert(col)
        reps: List[SparseVec] = []
        for z in _kernel(complex_, n):
            r = image_ech.reduce(z)
            if combined.insert(r) is not None:
                reps.append(r)
        degrees[n] = DegreeData(n, len(reps), reps, image_cols, prev)
    result = Cohomology(complex_, degrees)
    complex_._cohomology_cache = result
    return result


def euler_characteristic(complex_: CochainComplex) -> int:
    return sum((-1) ** b.degree for b in complex_.basis)


@dataclass(frozen=True)
class ClassResult:
    degree: int
    coordinates: Tuple
    exact: bool
    witness: Optional[SparseVec]

    @property
    def nonzero(self) -> bool:
        return not self.exact


def _coerce_vec(x, complex_: CochainComplex) -> SparseVec:
    if isinstance(x, GradedElement):
        return x.coeffs
    return {i: c for i, c in x.items() if c}


def class_of(x, complex_: CochainComplex) -> ClassResult:
    """Coordinates of the class of a closed element in the representative basis."""
    vec = _coerce_vec(x, complex_)
    if complex_.apply_d(vec):
        raise NotClosed("element is not closed for this differential")
    if not vec:
        return ClassResult(-1, (), True, {})
    n = complex_.degree_of(vec)
    if n is None:
        raise NotHomogeneous("class_of needs a homogeneous element")
    data = cohomology(complex_).degrees.get(n)
    reps = data.representatives if data else []
    image = data.image if data else []
    sol = solve_sparse_columns(list(reps) + list(image), vec)
    if sol is None:
        raise ModelError("closed element not in span of representatives and image (internal error)")
    coords = tuple(sol.get(i, Fraction(0)) for i in range(len(reps)))
    if any(coords):
        return ClassResult(n, coords, False, None)
    w = solve_sparse_columns(list(image), vec)
    witness = {data.image_sources[j]: c for j, c in w.items()} if w else {}
    return ClassResult(n, coords, True, witness)


def same_class(x, y, complex_: CochainComplex) -> bool:
    """True when x - y is exact."""
    diff = axpy(_coerce_vec(x, complex_), -1, _coerce_vec(y, complex_))
    return class_of(diff, complex_).exact


# validation

@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: Tuple[str, ...]
    detail: str = ""


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    exhaustive: bool = True
    checked: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok, "exhaustive": self.exhaustive, "checked": dict(self.checked),
                "violations": [{"axiom": v.axiom, "witness": list(v.witness), "detail": v.detail}
                               for v in self.violations]}


PAIR_LIMIT = 400
TRIPLE_LIMIT = 48
SAMPLE_PAIRS = 4000
SAMPLE_TRIPLES = 3000


def validate(model: FiniteCdga, exhaustive: Optional[bool] = None, seed: int = 0,
             max_violations: int = 50) -> ValidationReport:
    """Check every cdga axiom; large models are checked on a seeded sample of pairs/triples."""
    rep = ValidationReport()
    basis = model.basis
    n = len(basis)
    deg = [b.degree for b in basis]
    maxdeg = model.max_degree
    names = [b.name for b in basis]

    def report(axiom, witness, detail=""):
        if len(rep.violations) < max_violations:
            rep.violations.append(Violation(axiom, tuple(names[i] for i in witness), detail))

    one = {model.unit: Fraction(1)}
    if deg[model.unit] != 0:
        report("unit", (model.unit,), "unit must have degree 0")
    for i in range(n):
        e = {i: Fraction(1)}
        if model.mult_vec(one, e) != e or model.mult_vec(e, one) != e:
            report("unit", (i,), "unit is not neutral")
        d = model.d_basis(i)
        if any(deg[r] != deg[i] + 1 for r in d):
            report("d-degree", (i,), "d does not raise degree by one")
        if model.apply_d(d):
            report("d^2", (i,), "d(d(x)) != 0")
        if model.weighted and any(basis[r].weight != basis[i].weight for r in d):
            report("weight", (i,), "d does not preserve weight")
    rep.checked["elements"] = n

    full_pairs = exhaustive if exhaustive is not None else n <= PAIR_LIMIT
    full_triples = exhaustive if exhaustive is not None else n <= TRIPLE_LIMIT
    rep.exhaustive = bool(full_pairs and full_triples)
    rng = random.Random(seed)

    if full_pairs:
        pairs: Iterable = ((i, j) for i in range(n) for j in range(n) if deg[i] + deg[j] <= maxdeg + 1)
    else:
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(SAMPLE_PAIRS)]
    count = 0
    for i, j in pairs:
        count += 1
        xi, xj = {i: Fraction(1)}, {j: Fraction(1)}
        p = model.mult(i, j)
        if deg[i] + deg[j] > maxdeg:
            if p:
                report("degree", (i, j), "product lands above the top degree")
            continue
        if any(deg[r] != deg[i] + deg[j] for r in p):
            report("degree", (i, j), "product degree is not additive")
        if model.weighted and any(basis[r].weight != basis[i].weight + basis[j].weight for r in p):
            report("weight", (i, j), "product does not preserve weight")
        q = model.mult(j, i)
        sign = -1 if (deg[i] * deg[j]) % 2 else 1
        if p != _vec_scale(q, sign):
            report("graded-commutativity", (i, j))
        lhs = model.apply_d(p)
        rhs = axpy(model.mult_vec(model.d_basis(i), xj), -1 if deg[i] % 2 else 1,
                   model.mult_vec(xi, model.d_basis(j)))
        if lhs != rhs:
            report("leibniz", (i, j), f"d(xy) - (dx y +- x dy) = {render_vector(model, axpy(lhs, -1, rhs))}")
    rep.checked["pairs"] = count

    if full_triples:
        triples: Iterable = ((i, j, k) for i in range(n) for j in range(n) if deg[i] + deg[j] <= maxdeg
                             for k in range(n) if deg[i] + deg[j] + deg[k] <= maxdeg)
    else:
        triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(SAMPLE_TRIPLES)]
    count = 0
    for i, j, k in triples:
        count += 1
        xi, xk = {i: Fraction(1)}, {k: Fraction(1)}
        left = model.mult_vec(model.mult(i, j), xk)
        right = model.mult_vec(xi, model.mult(j, k))
        if left != right:
            report("associativity", (i, j, k))
    rep.checked["triples"] = count
    return rep


# quotients

@dataclass
class Quotient:
    model: FiniteCdga
    source: FiniteCdga
    complement: List[int]
    _ideal: Echelon

    def project(self, x) -> GradedElement:
        vec = _coerce_vec(x, self.source)
        r = self._ideal.reduce(vec)
        pos = {g: l for l, g in enumerate(self.complement)}
        return GradedElement(self.model, {pos[g]: c for g, c in r.items()})


def quotient_by_ideal(model: FiniteCdga, gen: GradedElement, name: str = "") -> Quotient:
    """Quotient by the dg ideal generated by a homogeneous element."""
    if gen.model is not model:
        raise ModelError("generator must live in the model")
    gen.require_degree()
    ideal = Echelon()
    for b in range(len(model.basis)):
        ideal.insert(model.mult_vec(gen.coeffs, {b: Fraction(1)}))
    dgen = model.apply_d(gen.coeffs)
    if ideal.reduce(dgen):
        raise IdealNotStable(f"d({gen}) = {render_vector(model, dgen)} is not in the ideal", witness=dgen)
    complement = [i for i in range(len(model.basis)) if i not in ideal.rows]
    pos = {g: l for l, g in enumerate(complement)}

    def proj(vec: SparseVec) -> SparseVec:
        return {pos[g]: c for g, c in ideal.reduce(vec).items()}

    basis = [model.basis[g] for g in complement]
    table = {}
    for a, ga in enumerate(complement):
        for b, gb in enumerate(complement):
            p = proj(model.mult(ga, gb))
            if p:
                table[(a, b)] = p
    diffs = [proj(model.d_basis(g)) for g in complement]
    unit = pos.get(model.unit)
    if unit is None:
        raise ModelError("the ideal contains the unit")
    coframe = None
    if model.coframe:
        coframe = [c for c in model.coframe if model.index(c) in pos]
    q = FiniteCdga(basis, table, diffs, unit=unit, field=model.field, coframe=coframe,
                   name=name or f"{model.name}/({gen})", weighted=model.weighted)
    return Quotient(q, model, complement, ideal)


# JSON

def _field_tag(field: int) -> str:
    return "Q" if not field else f"Q(sqrt{field})"


def _parse_field_tag(tag: str) -> int:
    if tag == "Q":
        return 0
    m = re.fullmatch(r"Q\(sqrt(\d+)\)", tag)
    if not m:
        raise ModelError(f"unknown field tag {tag!r}")
    return int(m.group(1))


def model_to_json(model: FiniteCdga) -> dict:
    names = [b.name for b in model.basis]
    products = []
    for (i, j), v in sorted(model.full_table().items()):
        for r, c in sorted(v.items()):
            products.append([names[i], names[j], names[r], scalar_to_json(c)])
    differential = []
    for i in range(len(names)):
        for r, c in sorted(model.d_basis(i).items()):
            differential.append([names[i], names[r], scalar_to_json(c)])
    out = {"field": _field_tag(model.field),
           "basis": [{"name": b.name, "degree": b.degree, "weight": b.weight} for b in model.basis],
           "unit": names[model.unit],
           "products": products,
           "differential": differential}
    if model.name:
        out["name"] = model.name
    if model.coframe:
        out["coframe"] = list(model.coframe)
    if model.weighted:
        out["weighted"] = True
    return out


class SchemaError(ModelError):
    pass


def model_from_json(doc: dict, check: bool = True) -> FiniteCdga:
    try:
        field_ = _parse_field_tag(doc.get("field", "Q"))
        basis = [BasisElement(str(b["name"]), int(b["degree"]), int(b.get("weight", 0))) for b in doc["basis"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed basis: {exc}") from None
    index = {b.name: i for i, b in enumerate(basis)}

    def idx(name, where):
        if name not in index:
            raise SchemaError(f"{where}: unknown basis element {name!r}")
        return index[name]

    table: Dict[Tuple[int, int], SparseVec] = {}
    for n, entry in enumerate(doc.get("products", [])):
        if len(entry) != 4:
            raise SchemaError(f"products[{n}]: expected [left, right, result, coefficient]")
        l, r, res, c = entry
        key = (idx(l, f"products[{n}]"), idx(r, f"products[{n}]"))
        table[key] = axpy(table.get(key, {}), scalar_from_json(c), {idx(res, f"products[{n}]"): 1})
    diffs: List[SparseVec] = [{} for _ in basis]
    for n, entry in enumerate(doc.get("differential", [])):
        if len(entry) != 3:
            raise SchemaError(f"differential[{n}]: expected [source, result, coefficient]")
        s, res, c = entry
        i = idx(s, f"differential[{n}]")
        diffs[i] = axpy(diffs[i], scalar_from_json(c), {idx(res, f"differential[{n}]"): 1})
    unit = idx(doc.get("unit", "1"), "unit")
    model = FiniteCdga(basis, table, diffs, unit=unit, field=field_, coframe=doc.get("coframe"),
                       name=doc.get("name", ""), weighted=bool(doc.get("weighted", False)))
    if check:
        report = validate(model)
        if not report.ok:
            v = report.violations[0]
            raise SchemaError(f"model fails {v.axiom} at {v.witness}: {v.detail}")
    return model


def same_structure(a: FiniteCdga, b: FiniteCdga) -> bool:
    return model_to_json(a) == model_to_json(b)
