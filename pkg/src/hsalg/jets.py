"""Truncated jets of diffeomorphisms of (R, 0) and their Lie algebra.

A jet of order k is stored as (a0, ..., a_{k-1}), meaning a0*z + ... + a_{k-1}*z^k.
The group product is composition: ``compose(f, g)`` is f(g(z)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from math import factorial
from typing import Dict, List, Sequence, Tuple

from .laurent import LaurentPoly, parse_laurent
from .scalars import format_rational


class OrderMismatch(ValueError):
    pass


def _series_mul(p: Sequence, q: Sequence, k: int) -> List[Fraction]:
    """Product of two series given by coefficients of z^1..z^k, truncated past z^k.

    Index i holds the coefficient of z^(i+1); the product of two such series
    starts at z^2, so the result is indexed the same way.
    """
    out = [Fraction(0)] * k
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            n = i + j + 1
            if n >= k:
                break
            if b:
                out[n] += a * b
    return out


def _series_powers(g: Sequence, k: int) -> List[List[Fraction]]:
    """g^1, ..., g^k truncated past z^k."""
    powers = [list(g)]
    for _ in range(k - 1):
        powers.append(_series_mul(powers[-1], g, k))
    return powers


@dataclass(frozen=True)
class JetPoly:
    order: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if self.order < 1 or len(coeffs) != self.order:
            raise ValueError(f"a jet of order {self.order} needs {self.order} coefficients")
        if not coeffs[0]:
            raise ValueError("leading coefficient a0 must be nonzero")

    @classmethod
    def identity(cls, k: int) -> JetPoly:
        return cls(k, (1,) + (0,) * (k - 1))

    @classmethod
    def parse(cls, text: str, k: int) -> JetPoly:
        p = parse_laurent(text, ("z",))
        coeffs = [Fraction(0)] * k
        for (e,), c in p.terms.items():
            if e < 1:
                raise ValueError(f"jet {text!r} has a term of degree {e} < 1")
            if e <= k:
                coeffs[e - 1] = c
        return cls(k, tuple(coeffs))

    @property
    def a0(self) -> Fraction:
        return self.coeffs[0]

    def in_unipotent(self) -> bool:
        return self.coeffs[0] == 1

    def orientation_preserving(self) -> bool:
        return self.coeffs[0] > 0

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "z" if i == 0 else f"z^{i + 1}"
            if c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{format_rational(c)}{mono}"
            parts.append(s)
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def to_json(self) -> dict:
        return {"k": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> JetPoly:
        return cls(int(obj["k"]), tuple(Fraction(c) for c in obj["coeffs"]))


@dataclass(frozen=True)
class JetVectorField:
    """sum_i c_i z^(i+1) d/dz, an element of g_k."""

    order: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.order:
            raise ValueError(f"a vector field of order {self.order} needs {self.order} coefficients")

    @classmethod
    def zero(cls, k: int) -> JetVectorField:
        return cls(k, (0,) * k)

    @classmethod
    def basis(cls, k: int, i: int) -> JetVectorField:
        c = [0] * k
        c[i] = 1
        return cls(k, tuple(c))

    def in_unipotent(self) -> bool:
        return self.coeffs[0] == 0

    def __add__(self, other: JetVectorField) -> JetVectorField:
        _check(self, other)
        return JetVectorField(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: JetVectorField) -> JetVectorField:
        _check(self, other)
        return JetVectorField(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c) -> JetVectorField:
        return JetVectorField(self.order, tuple(Fraction(c) * a for a in self.coeffs))

    def to_json(self) -> dict:
        return {"k": self.order, "coeffs": [format_rational(c) for c in self.coeffs], "lie": True}


def _check(x, y):
    if x.order != y.order:
        raise OrderMismatch(f"orders {x.order} and {y.order} differ")


def _substitute(f: Sequence, g_powers: List[List[Fraction]], k: int) -> List[Fraction]:
    out = [Fraction(0)] * k
    for i, a in enumerate(f):
        if a:
            for n, c in enumerate(g_powers[i]):
                if c:
                    out[n] += a * c
    return out


def compose(f: JetPoly, g: JetPoly) -> JetPoly:
    """f(g(z)) truncated past z^k."""
    _check(f, g)
    k = f.order
    return JetPoly(k, tuple(_substitute(f.coeffs, _series_powers(g.coeffs, k), k)))


def invert(f: JetPoly) -> JetPoly:
    """The compositional inverse, solved degree by degree."""
    k = f.order
    g = [Fraction(0)] * k
    g[0] = 1 / f.coeffs[0]
    for n in range(1, k):
        # coefficient of z^(n+1) in f(g) must vanish; it is a0*g_n + (terms in g_0..g_{n-1})
        trial = _substitute(f.coeffs, _series_powers(g, k), k)
        g[n] = -trial[n] / f.coeffs[0]
    return JetPoly(k, tuple(g))


def project(f: JetPoly, m: int) -> JetPoly:
    if not 1 <= m <= f.order:
        raise ValueError(f"cannot project order {f.order} to order {m}")
    return JetPoly(m, f.coeffs[:m])


def decompose_semidirect(f: JetPoly) -> Tuple[Fraction, JetPoly]:
    """Write f(z) = h(u z) with h unipotent; returns (u, h)."""
    u = f.coeffs[0]
    h = tuple(c / u ** (i + 1) for i, c in enumerate(f.coeffs))
    return u, JetPoly(f.order, h)


def recompose_semidirect(u, h: JetPoly) -> JetPoly:
    u = Fraction(u)
    return JetPoly(h.order, tuple(c * u ** (i + 1) for i, c in enumerate(h.coeffs)))


def lie_bracket(X: JetVectorField, Y: JetVectorField) -> JetVectorField:
    """Vector-field bracket: [z^(i+1) d, z^(j+1) d] = (j - i) z^(i+j+1) d."""
    _check(X, Y)
    k = X.order
    out = [Fraction(0)] * k
    for i, a in enumerate(X.coeffs):
        if not a:
            continue
        for j, b in enumerate(Y.coeffs):
            if b and i + j < k:
                out[i + j] += (j - i) * a * b
    return JetVectorField(k, tuple(out))


def _apply_field(X: Sequence, series: Sequence, k: int) -> List[Fraction]:
    """The series X(s) = sum_i c_i s^(i+1) for a series s without constant term."""
    return _substitute(X, _series_powers(series, k), k)


def _flow_unipotent(X: JetVectorField) -> List[Fraction]:
    """Time-1 flow of a nilpotent field by Picard iteration.

    z(t) is a polynomial in t whose coefficients are series in the initial point;
    each iteration fixes at least one more order in z, so k passes suffice.
    """
    k = X.order
    ident = [Fraction(0)] * k
    ident[0] = Fraction(1)
    # z_t[m] = series coefficient of t^m
    z_t: Dict[int, List[Fraction]] = {0: ident}
    for _ in range(k):
        # X(z(t)) as a polynomial in t: expand powers of z(t) keeping t exponents
        new = {0: list(ident)}
        # powers of z(t) as dict t-degree -> series
        power = dict(z_t)
        powers = [power]
        for _ in range(k - 1):
            nxt: Dict[int, List[Fraction]] = {}
            for ta, sa in powers[-1].items():
                for tb, sb in z_t.items():
                    prod = _series_mul(sa, sb, k)
                    if any(prod):
                        acc = nxt.setdefault(ta + tb, [Fraction(0)] * k)
                        for n, c in enumerate(prod):
                            acc[n] += c
            powers.append(nxt)
        for i, c in enumerate(X.coeffs):
            if not c:
                continue
            for tdeg, series in powers[i].items():
                # integrate t^tdeg from 0 to t
                acc = new.setdefault(tdeg + 1, [Fraction(0)] * k)
                for n, s in enumerate(series):
                    acc[n] += c * s / (tdeg + 1)
        z_t = {t: s for t, s in new.items() if any(s)}
    total = [Fraction(0)] * k
    for series in z_t.values():
        for n, c in enumerate(series):
            total[n] += c
    return total


def exp_flow(X: JetVectorField, linear_factor=None) -> JetPoly:
    """Time-1 jet of the flow of X.

    For X in k_k the result is exact.  When c0 != 0 the scalar part contributes the
    factor e^{c0}, which is rarely rational; the caller passes it as ``linear_factor``
    and the result is (linear_factor * z) composed after the unipotent flow of X_+.
    """
    k = X.order
    c0 = X.coeffs[0]
    plus = JetVectorField(k, (Fraction(0),) + X.coeffs[1:])
    unip = JetPoly(k, tuple(_flow_unipotent(plus)))
    if not c0:
        return unip
    if linear_factor is None:
        raise ValueError("exp of a field with c0 != 0 needs the exact value of e^{c0} as linear_factor")
    lam = Fraction(linear_factor)
    return compose(JetPoly(k, (lam,) + (0,) * (k - 1)), unip)


def log_jet(f: JetPoly) -> JetVectorField:
    """Inverse of exp_flow on K_k."""
    if f.coeffs[0] != 1:
        raise ValueError("log_jet needs a unipotent jet (a0 = 1)")
    k = f.order
    X = [Fraction(0)] + list(f.coeffs[1:])
    for _ in range(k):
        trial = exp_flow(JetVectorField(k, tuple(X))).coeffs
        delta = [a - b for a, b in zip(f.coeffs, trial)]
        if not any(delta):
            break
        X = [x + d for x, d in zip(X, delta)]
    result = JetVectorField(k, tuple(X))
    if exp_flow(result) != f:
        raise ArithmeticError("logarithm iteration did not converge")
    return result


def lie_series_exp(X: JetVectorField) -> JetPoly:
    """exp via the Lie series sum_n X^n(z)/n!, used as an independent check for k_k."""
    if X.coeffs[0]:
        raise ValueError("Lie series only terminates for fields in k_k")
    k = X.order
    term = [Fraction(0)] * k
    term[0] = Fraction(1)
    total = list(term)
    for n in range(1, k + 1):
        # X acting on a function s(z) is X(z) * s'(z)
        deriv = [Fraction(0)] * k
        for i, c in enumerate(term):
            if c:
                deriv[i] += (i + 1) * c
        # s'(z) has a constant term; multiply as polynomials in z
        xz = list(X.coeffs)
        new = [Fraction(0)] * k
        for i, a in enumerate(xz):
            if not a:
                continue
            for j, b in enumerate(deriv):
                if b and i + j < k:
                    new[i + j] += a * b
        term = new
        for i, c in enumerate(term):
            total[i] += c / factorial(n)
    return JetPoly(k, tuple(total))


def extension_cocycle(f: JetPoly, g: JetPoly) -> Fraction:
    """Kernel coordinate c with s(f) o s(g) = (z + c z^(k+1)) o s(fg).

    s appends a zero coefficient.  The raw top coefficient of s(f) o s(g) - s(fg)
    equals c * a0(fg)^(k+1); dividing makes the weight -k cocycle identity hold.
    """
    _check(f, g)
    k = f.order
    sf = JetPoly(k + 1, f.coeffs + (Fraction(0),))
    sg = JetPoly(k + 1, g.coeffs + (Fraction(0),))
    top = compose(sf, sg).coeffs[k]
    return top / (f.coeffs[0] * g.coeffs[0]) ** (k + 1)


def cocycle_action(f: JetPoly) -> Fraction:
    """The weight -k action of f on the kernel R of G_{k+1} -> G_k."""
    return f.coeffs[0] ** (-f.order)


def right_invariant_coeffs(r: int, k: int) -> Dict[int, LaurentPoly]:
    """p_{r,i}(a_1..a_{k-1}) for i = r..k-1, by the multinomial sum over S_{r,i}."""
    if not 1 <= r <= k - 1:
        raise ValueError(f"r={r} outside 1..{k - 1}")
    names = tuple(f"a{i}" for i in range(1, k))
    out = {}
    for i in range(r, k):
        target = i - r
        poly = LaurentPoly(names, {})
        # j_t >= 0 for t = 1..k-1 with sum t*j_t = target; j_0 fills up to r+1
        ranges = [range(target // t + 1) for t in range(1, k)]
        for js in _cartesian(*ranges):
            if sum(t * j for t, j in zip(range(1, k), js)) != target:
                continue
            j0 = r + 1 - sum(js)
            if j0 < 0:
                continue
            coeff = factorial(r + 1) // factorial(j0)
            for j in js:
                coeff //= factorial(j)
            poly = poly + LaurentPoly(names, {tuple(js): coeff})
        out[i] = poly
    return out


def right_invariant_field(r: int, k: int) -> Dict[str, LaurentPoly]:
    """V_r as a map from coordinate name a_i to its coefficient."""
    return {f"a{i}": p for i, p in right_invariant_coeffs(r, k).items()}


def adjoint(f: JetPoly, X: JetVectorField) -> JetVectorField:
    """d/de of f o exp(eX) o f^{-1}: equals (f' * X) o f^{-1}."""
    _check(f, X)
    k = f.order
    # f'(z) * X(z): f' = a0 + 2 a1 z + ..., X(z) = sum c_i z^(i+1)
    fprime = [(i + 1) * c for i, c in enumerate(f.coeffs)]
    prod = [Fraction(0)] * k
    for i, a in enumerate(fprime):
        if not a:
            continue
        for j, c in enumerate(X.coeffs):
            if c and i + j < k:
                prod[i + j] += a * c
    g = invert(f)
    return JetVectorField(k, tuple(_substitute(prod, _series_powers(g.coeffs, k), k)))
