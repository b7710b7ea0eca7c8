"""Multivariate Laurent polynomials with rational coefficients."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .scalars import format_rational

Exponent = Tuple[int, ...]


class VariableMismatch(ValueError):
    pass


class LaurentPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Optional[Mapping[Exponent, object]] = None):
        object.__setattr__(self, "vars", tuple(variables))
        clean: Dict[Exponent, Fraction] = {}
        n = len(self.vars)
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ValueError("exponent length does not match variables")
            c = Fraction(c) if not isinstance(c, Fraction) else c
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # constructors

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> LaurentPoly:
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Mapping[str, int], c=1) -> LaurentPoly:
        variables = tuple(variables)
        e = [0] * len(variables)
        for name, p in exps.items():
            e[variables.index(name)] += p
        return cls(variables, {tuple(e): c})

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> LaurentPoly:
        return cls.monomial(variables, {name: 1})

    # arithmetic

    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPoly(self.vars, t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative power of a non-monomial")
            (e, c), = self.terms.items()
            return LaurentPoly(self.vars, {tuple(n * x for x in e): Fraction(1) / c ** (-n)})
        out = LaurentPoly.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPoly(self.vars, {e: c / other for e, c in self.terms.items()})
        return divide_exact(self, self._coerce(other))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(self.vars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(self.terms.items())))

    # calculus and evaluation

    def partial(self, name: str) -> LaurentPoly:
        i = self.vars.index(name)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return LaurentPoly(self.vars, t)

    def depends_on(self, name: str) -> bool:
        i = self.vars.index(name)
        return any(e[i] for e in self.terms)

    def substitute(self, values: Mapping[str, object]) -> LaurentPoly:
        """Replace the named variables by scalars (remaining variables stay symbolic)."""
        idx = {self.vars.index(k): Fraction(v) for k, v in values.items()}
        t: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            coeff = c
            f = list(e)
            for i, v in idx.items():
                if f[i]:
                    if not v and f[i] < 0:
                        raise ZeroDivisionError("pole at substitution point")
                    coeff = coeff * v ** f[i]
                    f[i] = 0
            t[tuple(f)] = t.get(tuple(f), 0) + coeff
        return LaurentPoly(self.vars, t)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def min_exponent(self, name: str) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no lowest exponent")
        i = self.vars.index(name)
        return min(e[i] for e in self.terms)

    def is_polynomial(self) -> bool:
        return all(x >= 0 for e in self.terms for x in e)

    def __repr__(self):
        return f"LaurentPoly({self.vars}, {str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0]))):
            mono = "*".join(
                v if p == 1 else f"{v}^{p}" for v, p in zip(self.vars, e) if p)
            if not mono:
                s = format_rational(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{format_rational(c)}*{mono}"
            parts.append(s)
        out = parts[0]
        for p in parts[1:]:
            out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return out


def _leading(p: LaurentPoly) -> Tuple[Exponent, Fraction]:
    e = max(p.terms)
    return e, p.terms[e]


def divide_exact(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """p/q in the Laurent ring; raises ArithmeticError if q does not divide p."""
    if not q:
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if not p:
        return LaurentPoly(p.vars, {})
    n = len(p.vars)
    # strip monomial content so both are honest polynomials and q has no monomial factor
    qmin = tuple(min(e[i] for e in q.terms) for i in range(n))
    pmin = tuple(min(e[i] for e in p.terms) for i in range(n))
    qs = LaurentPoly(q.vars, {tuple(a - b for a, b in zip(e, qmin)): c for e, c in q.terms.items()})
    ps = LaurentPoly(p.vars, {tuple(a - b for a, b in zip(e, pmin)): c for e, c in p.terms.items()})
    quotient: Dict[Exponent, Fraction] = {}
    rem = ps
    lq, cq = _leading(qs)
    while rem:
        le, lc = _leading(rem)
        shift = tuple(a - b for a, b in zip(le, lq))
        if any(x < 0 for x in shift):
            raise ArithmeticError(f"({p}) is not divisible by ({q})")
        c = lc / cq
        quotient[shift] = quotient.get(shift, 0) + c
        rem = rem - LaurentPoly(p.vars, {shift: c}) * qs
    offset = tuple(a - b for a, b in zip(pmin, qmin))
    return LaurentPoly(p.vars, {tuple(a + b for a, b in zip(e, offset)): c for e, c in quotient.items()})


# parsing

_NUM = r"\d+(?:/\d+)?"
_FACTOR = re.compile(rf"\s*(?:({_NUM})|([A-Za-z_][A-Za-z_0-9]*)(?:\s*\^\s*\(?\s*(-?\d+)\s*\)?)?)\s*")


_GLUED = re.compile(rf"({_NUM})([A-Za-z_].*)")


def _split_factors(term: str):
    """Split at '*'; a number glued to a variable ("2z^2") counts as two factors."""
    for factor in term.split("*"):
        m = _GLUED.fullmatch(factor)
        if m:
            yield m.group(1)
            yield m.group(2)
        else:
            yield factor


def parse_laurent(text: str, variables: Sequence[str]) -> LaurentPoly:
    """Parse strings such as ``3*u^3``, ``-t^2*u^2 + 1/2*x``, ``t^-4``, ``2z^2``."""
    variables = tuple(variables)
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    # split into signed terms at top-level + and - (a '-' right after '^' or '(' is an exponent sign)
    terms = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and cur and cur[-1] not in "^(":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    total = LaurentPoly(variables, {})
    for term in terms:
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = Fraction(sign)
        exps = [0] * len(variables)
        for factor in _split_factors(term):
            m = _FACTOR.fullmatch(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            num, name, power = m.groups()
            if num is not None:
                coeff *= Fraction(num)
            else:
                if name not in variables:
                    raise ValueError(f"unknown variable {name!r} in {text!r}")
                exps[variables.index(name)] += int(power) if power is not None else 1
        total = total + LaurentPoly(variables, {tuple(exps): coeff})
    return total


def polynomial_ring(names: Iterable[str]):
    """Convenience: return the variable generators of a Laurent ring."""
    names = tuple(names)
    return tuple(LaurentPoly.var(names, n) for n in names)
