"""Exact arithmetic in Q and quadratic fields Q(sqrt(d)).

A :class:`QuadNum` stores ``(p + r*sqrt(d)) / q`` with integers ``p, r, q``
(``q > 0``, ``gcd(p, r, q) = 1``) and a square-free radicand ``d``.  Pure
rationals carry ``d = 0``.  Every Butcher coefficient used by this package
lives in one such field, so all order-condition sums can be compared without
rounding.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "QuadNum",
    "MixedRadicands",
    "to_float",
    "is_zero",
    "arith",
    "as_quad",
    "square_free_part",
]


class MixedRadicands(ValueError):
    """Raised when combining values from two different quadratic fields."""


def square_free_part(n: int) -> tuple[int, int]:
    """Split ``n >= 0`` as ``k**2 * m`` with ``m`` square-free; return ``(k, m)``."""
    if n < 0:
        raise ValueError("radicand must be nonnegative")
    if n == 0:
        return 0, 0
    k, m = 1, n
    f = 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            k *= f
        f += 1
    return k, m


class QuadNum:
    """Immutable element ``a + b*sqrt(d)`` of Q(sqrt(d)) with rational ``a, b``."""

    __slots__ = ("_p", "_r", "_q", "_d")

    def __init__(self, a=0, b=0, d: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        d = int(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b and d:
            k, d = square_free_part(d)
            b *= k
        if d == 1:
            a, b, d = a + b, Fraction(0), 0
        if d == 0 or b == 0:
            b, d = Fraction(0), 0
        q = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (q // a.denominator), b.numerator * (q // b.denominator), q, d)

    def _set(self, p: int, r: int, q: int, d: int) -> None:
        if q < 0:
            p, r, q = -p, -r, -q
        if r == 0:
            d = 0
        g = math.gcd(math.gcd(p, r), q)
        if g > 1:
            p //= g
            r //= g
            q //= g
        self._p, self._r, self._q, self._d = p, r, q, d

    @classmethod
    def _raw(cls, p: int, r: int, q: int, d: int) -> "QuadNum":
        obj = cls.__new__(cls)
        obj._set(p, r, q, d)
        return obj

    @classmethod
    def sqrt(cls, n: int) -> "QuadNum":
        """Exact square root of a nonnegative integer."""
        k, m = square_free_part(n)
        if m == 1:
            return cls(k)
        return cls(0, k, m)

    # -- components -------------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._q)

    @property
    def b(self) -> Fraction:
        return Fraction(self._r, self._q)

    @property
    def d(self) -> int:
        return self._d

    def is_rational(self) -> bool:
        return self._r == 0

    def conjugate(self) -> "QuadNum":
        return QuadNum._raw(self._p, -self._r, self._q, self._d)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - d*b**2``."""
        return Fraction(self._p * self._p - self._d * self._r * self._r, self._q * self._q)

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _common(x: "QuadNum", y: "QuadNum") -> int:
        if x._d == y._d or y._r == 0:
            return x._d
        if x._r == 0:
            return y._d
        raise MixedRadicands(f"cannot combine sqrt({x._d}) and sqrt({y._d})")

    def __add__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        d = QuadNum._common(self, y)
        q = self._q * y._q
        return QuadNum._raw(self._p * y._q + y._p * self._q, self._r * y._q + y._r * self._q, q, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNum._raw(-self._p, -self._r, self._q, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return self + (-y)

    def __rsub__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return y + (-self)

    def __mul__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        d = QuadNum._common(self, y)
        p = self._p * y._p + d * self._r * y._r
        r = self._p * y._r + self._r * y._p
        return QuadNum._raw(p, r, self._q * y._q, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadNum":
        # 1/x = q * (p - r sqrt d) / (p^2 - d r^2)
        n = self._p * self._p - self._d * self._r * self._r
        if n == 0:
            raise ZeroDivisionError("division by zero QuadNum")
        return QuadNum._raw(self._q * self._p, -self._q * self._r, n, self._d)

    def __truediv__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        QuadNum._common(self, y)
        return self * y.inverse()

    def __rtruediv__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadNum._raw(1, 0, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / conversion -----------------------------------------
    def __eq__(self, other):
        y = _coerce(other)
        if y is None:
            if isinstance(other, float):
                return float(self) == other
            return NotImplemented
        return (self._p, self._r, self._q, self._d) == (y._p, y._r, y._q, y._d)

    def __hash__(self):
        if self._r == 0:
            return hash(Fraction(self._p, self._q))
        return hash((self._p, self._r, self._q, self._d))

    def __bool__(self):
        return self._p != 0 or self._r != 0

    def sign(self) -> int:
        """Exact sign of the value (-1, 0 or 1)."""
        sp = (self._p > 0) - (self._p < 0)
        sr = (self._r > 0) - (self._r < 0)
        if sr == 0:
            return sp
        if sp == 0 or sp == sr:
            return sr
        # opposite signs: compare p^2 with d r^2
        diff = self._p * self._p - self._d * self._r * self._r
        return sp if diff > 0 else sr

    def __lt__(self, other):
        return (self - _coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - _coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - _coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - _coerce(other)).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return to_float(self)

    def __repr__(self):
        return f"QuadNum('{self}')"

    def __str__(self):
        p, r, q, d = self._p, self._r, self._q, self._d
        if r == 0:
            return str(p) if q == 1 else f"{p}/{q}"
        if abs(r) == 1:
            rad = f"sqrt{{{d}}}"
        else:
            rad = f"{abs(r)}*sqrt{{{d}}}"
        sgn = "-" if r < 0 else "+"
        if p == 0:
            body = rad if r > 0 else f"-{rad}"
        else:
            body = f"{p}{sgn}{rad}"
        if p == 0:
            return body if q == 1 else f"{body}/{q}"
        return f"({body})" if q == 1 else f"({body})/{q}"

    @classmethod
    def parse(cls, text: str) -> "QuadNum":
        """Parse an exact coefficient such as ``25/24`` or ``(16-sqrt{6})/36``.

        The grammar is ordinary arithmetic over integers with ``+ - * /``,
        parentheses and ``sqrt{n}`` / ``sqrt(n)`` / ``sqrtn``; a coefficient
        directly followed by ``sqrt`` (``7sqrt5``) means multiplication.
        """
        return _Parser(text).parse()


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|sqrt\s*(?:\{\s*(?P<r1>\d+)\s*\}|\(\s*(?P<r2>\d+)\s*\)|(?P<r3>\d+))|(?P<op>[-+*/()]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN_RE.match(stripped, pos)
            if not m:
                raise ValueError(f"cannot parse exact coefficient {text!r}")
            if m.group("int") is not None:
                self.tokens.append(("num", QuadNum(int(m.group("int")))))
            elif m.group("op") is not None:
                self.tokens.append(("op", m.group("op")))
            else:
                rad = int(m.group("r1") or m.group("r2") or m.group("r3"))
                self.tokens.append(("num", QuadNum.sqrt(rad)))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self) -> QuadNum:
        if not self.tokens:
            raise ValueError(f"cannot parse exact coefficient {self.text!r}")
        value = self._expr()
        if self.i != len(self.tokens):
            raise ValueError(f"cannot parse exact coefficient {self.text!r}")
        return value

    def _expr(self):
        value = self._term()
        while self._peek() in (("op", "+"), ("op", "-")):
            op = self._next()[1]
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self):
        value = self._unary()
        while True:
            kind, tok = self._peek()
            if tok in ("*", "/"):
                self._next()
                rhs = self._unary()
                value = value * rhs if tok == "*" else value / rhs
            elif kind == "num" or tok == "(":
                value = value * self._unary()  # implicit product, e.g. 7sqrt5
            else:
                return value

    def _unary(self):
        if self._peek() == ("op", "-"):
            self._next()
            return -self._unary()
        if self._peek() == ("op", "+"):
            self._next()
            return self._unary()
        return self._atom()

    def _atom(self):
        kind, tok = self._next()
        if kind == "num":
            return tok
        if tok == "(":
            value = self._expr()
            if self._next() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            return value
        raise ValueError(f"cannot parse exact coefficient {self.text!r}")


def _coerce(x):
    if isinstance(x, QuadNum):
        return x
    if isinstance(x, (int, Rational)):
        return QuadNum(x)
    return None


def as_quad(x) -> QuadNum:
    """Convert an int, Fraction, string or QuadNum to QuadNum."""
    if isinstance(x, str):
        return QuadNum.parse(x)
    y = _coerce(x)
    if y is None:
        raise TypeError(f"cannot convert {type(x).__name__} to QuadNum exactly")
    return y


def to_float(x: QuadNum) -> float:
    """Nearest double to ``x`` (no cancellation, error well below 4 ulp)."""
    x = as_quad(x)
    p, r, q, d = x._p, x._r, x._q, x._d
    if r == 0:
        return float(Fraction(p, q))
    if p == 0 or (p > 0) == (r > 0):
        return float(Fraction(p, q) + _sqrt_fraction(r * r * d) * (1 if r > 0 else -1) / q)
    # opposite signs: x = (p^2 - d r^2) / (q (p - r sqrt d)), denominator has no cancellation
    den = Fraction(p) - _sqrt_fraction(r * r * d) * (1 if r > 0 else -1)
    return float(Fraction(p * p - d * r * r) / (q * den))


def _sqrt_fraction(n: int, bits: int = 160) -> Fraction:
    scale = 1 << bits
    return Fraction(math.isqrt(n * scale * scale), scale)


def is_zero(x: QuadNum) -> bool:
    return not as_quad(x)


def arith(x: QuadNum, y: QuadNum, op: str) -> QuadNum:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} exactly."""
    x, y = as_quad(x), as_quad(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")
