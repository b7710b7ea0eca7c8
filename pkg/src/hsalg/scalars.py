"""Exact scalars: rationals (stdlib ``Fraction``) and real quadratic fields Q(sqrt d)."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Rational = Fraction


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


class FieldMismatch(TypeError):
    pass


class QuadScalar:
    """The number a + b*sqrt(d) with a, b rational and d squarefree, d > 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = 5):
        if not _squarefree(d):
            raise ValueError(f"d={d} is not a squarefree integer > 1")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    def _coerce(self, other):
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                raise FieldMismatch(f"Q(sqrt {self.d}) vs Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadScalar(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadScalar(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadScalar(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadScalar(self.a * o.a + self.d * self.b * o.b,
                          self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> QuadScalar:
        return QuadScalar(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> QuadScalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt d)")
        c = self.conjugate()
        return QuadScalar(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadScalar(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d) or (
                not self.b and not other.b and self.a == other.a)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __repr__(self):
        return f"QuadScalar({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        if not self.b:
            return format_rational(self.a)
        root = f"sqrt{self.d}"
        if self.b == 1:
            tail = root
        elif self.b == -1:
            tail = "-" + root
        else:
            tail = f"{format_rational(self.b)}*{root}"
        if not self.a:
            return tail
        sign = "" if tail.startswith("-") else "+"
        return f"{format_rational(self.a)}{sign}{tail}"


Scalar = Union[Fraction, QuadScalar]


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def field_of(x) -> int:
    """0 for Q, d for Q(sqrt d)."""
    if isinstance(x, QuadScalar):
        return x.d
    return 0


def field_arithmetic(x, y, op: str):
    fx, fy = field_of(x), field_of(y)
    if fx and fy and fx != fy:
        raise FieldMismatch(f"Q(sqrt {fx}) vs Q(sqrt {fy})")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if not y:
            raise ZeroDivisionError("division by zero")
        return x / y
    raise ValueError(f"unknown op {op!r}")


def to_json(x):
    if isinstance(x, QuadScalar):
        return {"a": format_rational(x.a), "b": format_rational(x.b), "d": x.d}
    return format_rational(x)


def from_json(obj):
    if isinstance(obj, dict):
        return QuadScalar(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["d"]))
    if isinstance(obj, (int, str)):
        return Fraction(obj)
    raise ValueError(f"not a scalar: {obj!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|sqrt\s*(?:\(\s*(\d+)\s*\)|(\d+))|(.))")


def parse_scalar(text: str):
    """Parse an exact expression built from integers, sqrtN, + - * / and parentheses."""
    tokens = []
    for m in _TOKEN.finditer(text.strip()):
        num, root_paren, root_bare, ch = m.groups()
        root = root_paren if root_paren is not None else root_bare
        if num is not None:
            tokens.append(("num", int(num)))
        elif root is not None:
            tokens.append(("sqrt", int(root)))
        elif ch is not None and not ch.isspace():
            tokens.append(("op", ch))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = unary()
            val = val * rhs if op == "*" else field_arithmetic(val, rhs, "div")
        return val

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return atom()

    def atom():
        kind, val = take()
        if kind == "num":
            return Fraction(val)
        if kind == "sqrt":
            r = math.isqrt(val)
            if r * r == val:
                return Fraction(r)
            # pull out square factors so d is squarefree
            coeff, d = 1, val
            f = 2
            while f * f <= d:
                while d % (f * f) == 0:
                    d //= f * f
                    coeff *= f
                f += 1
            return QuadScalar(0, coeff, d)
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return inner
        raise ValueError(f"cannot parse scalar {text!r}")

    if not tokens:
        raise ValueError("empty scalar expression")
    out = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing input in scalar {text!r}")
    return out
