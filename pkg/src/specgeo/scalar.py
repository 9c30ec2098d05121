"""Exact scalars: the multi-quadratic fields Q(sqrt(m1), ..., sqrt(mr)) and their
Gaussian extension.

A :class:`QSqrt` is a finite sum ``sum_m c_m * sqrt(m)`` with rational ``c_m`` and
square-free positive radicands ``m`` (``m = 1`` is the rational part).  Products
of radicals are reduced eagerly, so two equal field elements always have the
same representation and ``==``/``hash`` are structural.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "QSqrt",
    "ExactComplex",
    "I",
    "as_exact",
    "sqrt_exact",
    "is_exact",
    "to_float",
    "to_complex",
    "sign",
    "parse_scalar",
]


@lru_cache(maxsize=4096)
def _prime_factors(m: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return tuple(out)


def _squarefree_split(m: int) -> tuple[int, int]:
    """Write a positive integer as s**2 * r with r square-free; return (s, r)."""
    s, r = 1, 1
    for p in _prime_factors(m):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            r *= p
    return s, r


class QSqrt:
    """Element of a multi-quadratic extension of the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        # terms: mapping radicand -> Fraction; assumed already reduced when built
        # internally, normalised here otherwise.
        if terms is None:
            self._terms = ()
        elif isinstance(terms, tuple):
            self._terms = terms
        else:
            self._terms = tuple(sorted((m, Fraction(c)) for m, c in terms.items() if c != 0))
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def rational(cls, q) -> "QSqrt":
        q = Fraction(q)
        return cls(((1, q),)) if q else cls()

    @classmethod
    def sqrt(cls, q) -> "QSqrt":
        """Exact square root of a non-negative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("square root of a negative rational is not real")
        if q == 0:
            return cls()
        s, r = _squarefree_split(q.numerator * q.denominator)
        return cls(((r, Fraction(s, q.denominator)),))

    # -- structure ----------------------------------------------------------
    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    @property
    def tower(self) -> tuple[int, ...]:
        """Primes whose square roots generate the smallest field containing self."""
        primes = set()
        for m, _ in self._terms:
            primes.update(_prime_factors(m))
        return tuple(sorted(primes))

    def is_rational(self) -> bool:
        return all(m == 1 for m, _ in self._terms)

    def rational_part(self) -> Fraction:
        for m, c in self._terms:
            if m == 1:
                return c
        return Fraction(0)

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, QSqrt):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return QSqrt.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in other._terms:
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return QSqrt(tuple(sorted(acc.items())))

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(tuple((m, -c) for m, c in self._terms))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return QSqrt()
            return QSqrt(tuple((m, c * other) for m, c in self._terms))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for a, ca in self._terms:
            for b, cb in other._terms:
                g = math.gcd(a, b)
                m = (a // g) * (b // g)
                v = acc.get(m, 0) + ca * cb * g
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
        return QSqrt(tuple(sorted(acc.items())))

    __rmul__ = __mul__

    def _split(self, p: int) -> tuple["QSqrt", "QSqrt"]:
        """self = a + sqrt(p) * b with a, b free of sqrt(p)."""
        a, b = [], []
        for m, c in self._terms:
            if m % p == 0:
                b.append((m // p, c))
            else:
                a.append((m, c))
        return QSqrt(tuple(sorted(a))), QSqrt(tuple(sorted(b)))

    def inverse(self) -> "QSqrt":
        if not self._terms:
            raise ZeroDivisionError("inverse of zero")
        primes = self.tower
        if not primes:
            return QSqrt.rational(1 / self._terms[0][1])
        p = primes[-1]
        a, b = self._split(p)
        conj = a - QSqrt.sqrt(p) * b
        norm = a * a - b * b * p
        return conj * norm.inverse()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return QSqrt(tuple((m, c / other) for m, c in self._terms))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out = QSqrt.rational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- comparison ---------------------------------------------------------
    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.rational_part())
            else:
                self._hash = hash(self._terms)
        return self._hash

    def sign(self) -> int:
        return _sign(self)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversion ---------------------------------------------------------
    def __float__(self):
        return float(sum(float(c) * math.sqrt(m) for m, c in self._terms))

    def __complex__(self):
        return complex(float(self))

    def conjugate(self):
        return self

    def __repr__(self):
        return f"QSqrt({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms:
            if m == 1:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"sqrt({m})")
            elif c == -1:
                parts.append(f"-sqrt({m})")
            else:
                parts.append(f"{c}*sqrt({m})")
        return " + ".join(parts).replace("+ -", "- ")


def _sign(x: QSqrt) -> int:
    if not x._terms:
        return 0
    primes = x.tower
    if not primes:
        c = x._terms[0][1]
        return (c > 0) - (c < 0)
    p = primes[-1]
    a, b = x._split(p)
    sa, sb = _sign(a), _sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb if sa == 0 else sa
    # a and sqrt(p) b have opposite signs: the larger square wins
    s = _sign(a * a - b * b * p)
    return sa if s > 0 else sb


class ExactComplex:
    """a + i b with exact real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_exact(re)
        self.im = as_exact(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction, QSqrt)):
            return ExactComplex(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return ExactComplex(num.re / n, num.im / n)

    def __pow__(self, e: int):
        out = ExactComplex(1, 0)
        for _ in range(e):
            out = out * self
        return out

    def conjugate(self):
        return ExactComplex(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ExactComplex({self.re}, {self.im})"



def as_exact(x) -> QSqrt:
    """Coerce an int / Fraction / QSqrt into a QSqrt.  Floats are refused."""
    if isinstance(x, QSqrt):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, (int, Fraction)):
        return QSqrt.rational(x)
    if isinstance(x, float):
        raise TypeError("float -> exact conversion is not allowed")
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


I = ExactComplex(0, 1)


def sqrt_exact(q) -> QSqrt:
    if isinstance(q, QSqrt):
        if not q.is_rational():
            raise ValueError("nested radicals are not supported")
        q = q.rational_part()
    return QSqrt.sqrt(q)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QSqrt, ExactComplex)) and not isinstance(x, bool)


def to_float(x) -> float:
    return float(x)


def to_complex(x) -> complex:
    return complex(x)


def sign(x) -> int:
    if isinstance(x, QSqrt):
        return x.sign()
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if x > 0:
        return 1
    return -1 if x < 0 else 0


def parse_scalar(text: str) -> QSqrt:
    """Parse strings like ``"3/4"``, ``"-1/2*sqrt(2)"`` or ``"1 + sqrt(3)"``."""
    from .poly import parse_constant

    return parse_constant(text)
