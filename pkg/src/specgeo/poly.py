"""Exact homogeneous polynomials, their polarizations and block decompositions."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeZeroError,
    DimensionMismatch,
    InhomogeneousError,
    PolySyntaxError,
    ZeroLevelError,
)
from .linalg import PseudoMetric
from .scalar import ExactComplex, QSqrt, as_exact, is_exact

__all__ = [
    "HomoPoly",
    "SymForm",
    "BlockStructure",
    "parse_poly",
    "parse_constant",
    "polarize",
    "eval_sym",
    "gradient",
    "hessian",
    "log_hessian",
    "multidegree_split",
    "perfect_power_exponent",
    "poly_to_json",
    "poly_from_json",
]


def _all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


class HomoPoly:
    """Homogeneous polynomial of degree ``d`` in ``n`` variables.

    ``monomials`` maps exponent tuples (length ``n``, sum ``d``) to exact
    coefficients.  Zero coefficients are never stored.  Instances are treated
    as immutable.
    """

    def __init__(self, n: int, monomials: dict, d: int | None = None):
        mons = {}
        for exp, c in monomials.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {n}")
            c = as_exact(c)
            if c:
                mons[exp] = mons.get(exp, QSqrt()) + c
                if not mons[exp]:
                    del mons[exp]
        degrees = {sum(e) for e in mons}
        if len(degrees) > 1:
            raise InhomogeneousError(f"mixed total degrees {sorted(degrees)}")
        if d is None:
            if not degrees:
                raise DegreeZeroError("cannot infer the degree of the zero polynomial")
            d = degrees.pop()
        elif degrees and degrees != {d}:
            raise InhomogeneousError(f"monomials of degree {sorted(degrees)} in a degree-{d} polynomial")
        self.n = n
        self.d = d
        self.monomials = dict(sorted(mons.items()))

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int, d: int) -> "HomoPoly":
        return cls(n, {}, d)

    @classmethod
    def constant(cls, n: int, c) -> "HomoPoly":
        return cls(n, {(0,) * n: c}, 0)

    @classmethod
    def variable(cls, n: int, i: int) -> "HomoPoly":
        exp = [0] * n
        exp[i] = 1
        return cls(n, {tuple(exp): 1}, 1)

    @classmethod
    def linear(cls, coeffs: Sequence) -> "HomoPoly":
        n = len(coeffs)
        mons = {}
        for i, c in enumerate(coeffs):
            exp = [0] * n
            exp[i] = 1
            mons[tuple(exp)] = c
        return cls(n, mons, 1)

    # -- basic protocol -----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, HomoPoly):
            return NotImplemented
        if self.n != other.n:
            return False
        if not self.monomials and not other.monomials:
            return True
        return self.d == other.d and self.monomials == other.monomials

    def __hash__(self):
        return hash((self.n, self.d, tuple(self.monomials.items())))

    def __bool__(self):
        return bool(self.monomials)

    def __repr__(self):
        return f"HomoPoly(n={self.n}, d={self.d}, '{self.to_text()}')"

    def to_text(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for exp, c in self.monomials.items():
            factors = []
            for i, e in enumerate(exp):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            cs = str(c)
            if len(c.terms) > 1:
                cs = f"({cs})"
            if not factors:
                parts.append(cs)
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic ---------------------------------------------------------
    def _check_compatible(self, other):
        if self.n != other.n:
            raise DimensionMismatch("polynomials live in different variable counts")

    def __add__(self, other: "HomoPoly") -> "HomoPoly":
        self._check_compatible(other)
        if not other.monomials:
            return self
        if not self.monomials:
            return other
        if self.d != other.d:
            raise InhomogeneousError("sum of polynomials of different degrees")
        mons = dict(self.monomials)
        for e, c in other.monomials.items():
            mons[e] = mons.get(e, QSqrt()) + c
        return HomoPoly(self.n, mons, self.d)

    def __neg__(self):
        return HomoPoly(self.n, {e: -c for e, c in self.monomials.items()}, self.d)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HomoPoly":
        c = as_exact(c)
        return HomoPoly(self.n, {e: c * v for e, v in self.monomials.items()}, self.d)

    def __mul__(self, other):
        if not isinstance(other, HomoPoly):
            return self.scale(other)
        self._check_compatible(other)
        mons: dict[tuple, QSqrt] = {}
        for e1, c1 in self.monomials.items():
            for e2, c2 in other.monomials.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                mons[e] = mons.get(e, QSqrt()) + c1 * c2
        return HomoPoly(self.n, mons, self.d + other.d)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = HomoPoly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------
    def derivative(self, i: int) -> "HomoPoly":
        if self.d == 0:
            return HomoPoly.zero(self.n, 0)
        mons = {}
        for exp, c in self.monomials.items():
            if exp[i]:
                e = list(exp)
                e[i] -= 1
                mons[tuple(e)] = c * exp[i]
        return HomoPoly(self.n, mons, self.d - 1)

    @cached_property
    def gradient_polys(self) -> list["HomoPoly"]:
        return [self.derivative(i) for i in range(self.n)]

    @cached_property
    def hessian_polys(self) -> list[list["HomoPoly"]]:
        g = self.gradient_polys
        return [[g[i].derivative(j) for j in range(self.n)] for i in range(self.n)]

    @cached_property
    def _float_terms(self):
        return [(exp, float(c)) for exp, c in self.monomials.items()]

    # -- evaluation ---------------------------------------------------------
    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point):
        point = list(point)
        if len(point) != self.n:
            raise DimensionMismatch(f"point has {len(point)} coordinates, polynomial has {self.n} variables")
        if _all_exact(point):
            acc = QSqrt()
            for exp, c in self.monomials.items():
                term = c
                for x, e in zip(point, exp):
                    if e:
                        term = term * x ** e
                acc = term + acc
            return acc
        acc = 0.0
        for exp, c in self._float_terms:
            term = c
            for x, e in zip(point, exp):
                if e:
                    term = term * x ** e
            acc = acc + term
        return acc

    def compose_linear(self, A) -> "HomoPoly":
        """The pulled-back polynomial X -> h(A X); A is n x m (rows = old variables)."""
        m = len(A[0])
        forms = [HomoPoly.linear(row) for row in A]
        acc = HomoPoly.zero(m, self.d)
        for exp, c in self.monomials.items():
            term = HomoPoly.constant(m, c)
            for f, e in zip(forms, exp):
                for _ in range(e):
                    term = term * f
            acc = acc + term
        return acc

    def extend(self, n_new: int, positions: Sequence[int]) -> "HomoPoly":
        """Re-embed into n_new variables, old variable i becoming positions[i]."""
        mons = {}
        for exp, c in self.monomials.items():
            e = [0] * n_new
            for i, k in enumerate(exp):
                e[positions[i]] += k
            mons[tuple(e)] = c
        return HomoPoly(n_new, mons, self.d)

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self.monomials.values()), default=0.0)

    def to_sympy(self, symbols=None):
        import sympy

        if symbols is None:
            symbols = sympy.symbols(f"x1:{self.n + 1}")
        expr = sympy.Integer(0)
        for exp, c in self.monomials.items():
            coeff = sum((sympy.Rational(q.numerator, q.denominator) * sympy.sqrt(m) for m, q in c.terms),
                        sympy.Integer(0))
            expr += coeff * sympy.Mul(*[s ** e for s, e in zip(symbols, exp)])
        return expr


# -- symmetric forms ----------------------------------------------------------

@lru_cache(maxsize=None)
def _distinct_perms(key: tuple) -> tuple[tuple, ...]:
    return tuple(sorted(set(itertools.permutations(key))))


@dataclass(frozen=True)
class SymForm:
    """Symmetric d-linear form stored on sorted index tuples."""

    n: int
    d: int
    values: dict

    def __call__(self, *args):
        return eval_sym(self, list(args))

    def entry(self, *idx):
        return self.values.get(tuple(sorted(idx)), QSqrt())


def polarize(h: HomoPoly) -> SymForm:
    """Polarization by coefficient extraction.

    A monomial ``c x^alpha`` contributes ``c * prod(alpha_i!) / d!`` to the single
    sorted index tuple with multiplicities ``alpha``.
    """
    dfact = math.factorial(h.d)
    values = {}
    for exp, c in h.monomials.items():
        key = tuple(i for i, e in enumerate(exp) for _ in range(e))
        mult = math.prod(math.factorial(e) for e in exp)
        values[key] = c * Fraction(mult, dfact)
    return SymForm(h.n, h.d, values)


def eval_sym(H: SymForm, args: Sequence[Sequence]):
    if len(args) != H.d:
        raise DimensionMismatch(f"expected {H.d} arguments, got {len(args)}")
    for a in args:
        if len(a) != H.n:
            raise DimensionMismatch(f"argument of length {len(a)}, expected {H.n}")
    exact = all(_all_exact(a) for a in args)
    acc = QSqrt() if exact else 0.0
    for key, val in H.values.items():
        v = val if exact else float(val)
        inner = None
        for perm in _distinct_perms(key):
            term = None
            for a, i in zip(args, perm):
                x = a[i]
                term = x if term is None else term * x
            if term is None:
                term = 1
            inner = term if inner is None else inner + term
        acc = inner * v + acc
    return acc


# -- derivatives as metrics ---------------------------------------------------

def gradient(h: HomoPoly, X0) -> list:
    return [g.evaluate(X0) for g in h.gradient_polys]


def hessian(h: HomoPoly, X0) -> PseudoMetric:
    rows = [[p.evaluate(X0) for p in row] for row in h.hessian_polys]
    return PseudoMetric(rows, [f"x{i + 1}" for i in range(h.n)])


def log_hessian(h: HomoPoly, X0) -> PseudoMetric:
    """d^2 log h = d^2 h / h - (dh)(dh)^T / h^2 at X0."""
    val = h.evaluate(X0)
    vanishes = (not val) if is_exact(val) else abs(val) < 1e-300
    if vanishes:
        raise ZeroLevelError("log h is undefined where h vanishes")
    grad = gradient(h, X0)
    hess = hessian(h, X0).gram
    h2 = val * val
    if is_exact(val):
        inv, inv2 = val.inverse(), h2.inverse()
    else:
        inv, inv2 = 1.0 / val, 1.0 / h2
    rows = [[hess[i][j] * inv - grad[i] * grad[j] * inv2 for j in range(h.n)] for i in range(h.n)]
    return PseudoMetric(rows, [f"x{i + 1}" for i in range(h.n)])


# -- blocks -------------------------------------------------------------------

@dataclass(frozen=True)
class BlockStructure:
    """Named blocks of 0-based variable indices partitioning range(n)."""

    blocks: tuple

    def __init__(self, blocks: Iterable):
        object.__setattr__(self, "blocks", tuple((str(name), tuple(idx)) for name, idx in blocks))

    def validate(self, n: int):
        seen = [i for _, idx in self.blocks for i in idx]
        if sorted(seen) != list(range(n)):
            raise ValueError("blocks must partition the variables exactly once")

    @property
    def names(self):
        return [name for name, _ in self.blocks]


def multidegree_split(h: HomoPoly, B: BlockStructure) -> dict[tuple, HomoPoly]:
    B.validate(h.n)
    out: dict[tuple, dict] = {}
    for exp, c in h.monomials.items():
        deg = tuple(sum(exp[i] for i in idx) for _, idx in B.blocks)
        out.setdefault(deg, {})[exp] = c
    return {deg: HomoPoly(h.n, mons, h.d) for deg, mons in sorted(out.items())}


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(sqrt)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r} at position {pos}")
        num, var, sq, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif var is not None:
            out.append(("var", int(var[1:])))
        elif sq is not None:
            out.append(("sqrt", None))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    """Recursive descent over sums of products; polynomials are dicts exp -> QSqrt."""

    def __init__(self, tokens, n):
        self.toks = tokens
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise PolySyntaxError(f"expected {value or kind}, found {tok[1]!r}")
        self.i += 1
        return tok

    def const(self, c):
        return {(0,) * self.n: as_exact(c)} if c else {}

    @staticmethod
    def add(p, q, sgn=1):
        out = dict(p)
        for e, c in q.items():
            v = out.get(e, QSqrt()) + (c if sgn > 0 else -c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return out

    @staticmethod
    def mul(p, q):
        out = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, QSqrt()) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return out

    def expr(self):
        sgn = 1
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            sgn = -1
        elif tok == ("op", "+"):
            self.take()
        acc = self.add({}, self.term(), sgn)
        while self.peek() in (("op", "+"), ("op", "-")):
            sgn = 1 if self.take()[1] == "+" else -1
            acc = self.add(acc, self.term(), sgn)
        return acc

    def term(self):
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                acc = self.mul(acc, self.factor())
            elif tok == ("op", "/"):
                self.take()
                den = self.take("num")[1]
                if den == 0:
                    raise PolySyntaxError("division by zero")
                acc = self.mul(acc, self.const(Fraction(1, den)))
            else:
                return acc

    def factor(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            base = self.const(val)
        elif kind == "var":
            self.take()
            if not 1 <= val <= self.n:
                raise PolySyntaxError(f"variable x{val} out of range 1..{self.n}")
            e = [0] * self.n
            e[val - 1] = 1
            base = {tuple(e): QSqrt.rational(1)}
        elif kind == "sqrt":
            self.take()
            self.take("op", "(")
            num = Fraction(self.take("num")[1])
            if self.peek() == ("op", "/"):
                self.take()
                num /= self.take("num")[1]
            self.take("op", ")")
            base = self.const(QSqrt.sqrt(num))
        elif (kind, val) == ("op", "("):
            self.take()
            base = self.expr()
            self.take("op", ")")
        elif (kind, val) == ("op", "-"):
            self.take()
            return self.mul(self.const(-1), self.factor())
        else:
            raise PolySyntaxError(f"unexpected token {val!r}")
        if self.peek() == ("op", "^"):
            self.take()
            k = self.take("num")[1]
            out = self.const(1)
            for _ in range(k):
                out = self.mul(out, base)
            return out
        return base


def _parse_dict(text: str, n: int) -> dict:
    if not text.strip():
        raise PolySyntaxError("empty expression")
    p = _Parser(_tokenize(text), n)
    out = p.expr()
    if p.i != len(p.toks):
        raise PolySyntaxError(f"trailing input at token {p.toks[p.i][1]!r}")
    return out


def parse_poly(text: str, n: int) -> HomoPoly:
    """Parse ``c * x<i>^e * ...`` terms joined by ``+``/``-``."""
    mons = _parse_dict(text, n)
    degrees = sorted({sum(e) for e in mons})
    if len(degrees) > 1:
        raise InhomogeneousError(f"terms of total degree {degrees}")
    if not degrees or degrees == [0]:
        raise DegreeZeroError("a basic polynomial needs degree >= 1")
    return HomoPoly(n, mons, degrees[0])


def parse_constant(text: str) -> QSqrt:
    mons = _parse_dict(text, 0)
    return mons.get((), QSqrt())


# -- serialization ------------------------------------------------------------

def poly_to_json(h: HomoPoly) -> dict:
    return {
        "n": h.n,
        "d": h.d,
        "monomials": [{"exp": list(e), "coeff": str(c)} for e, c in h.monomials.items()],
    }


def poly_from_json(data: dict) -> HomoPoly:
    n = int(data["n"])
    if "monomials" in data:
        mons = {tuple(m["exp"]): parse_constant(str(m["coeff"])) for m in data["monomials"]}
        h = HomoPoly(n, mons, data.get("d"))
    else:
        h = parse_poly(data["poly"], n)
    if "d" in data and h.d != int(data["d"]):
        raise InhomogeneousError(f"declared degree {data['d']} but polynomial has degree {h.d}")
    return h


# -- basic-polynomial guard ---------------------------------------------------

def perfect_power_exponent(h: HomoPoly, lines: int = 20, seed: int = 0) -> int:
    """Heuristic: largest k > 1 such that h restricted to `lines` random rational
    lines is always a k-th power of a univariate polynomial, else 1.

    A genuine power g**k always passes; a non-power passing all lines is
    possible in principle but not expected for random lines.
    """
    import sympy

    rng = np.random.default_rng(seed)
    t = sympy.Symbol("t")
    syms = sympy.symbols(f"x1:{h.n + 1}")
    expr = h.to_sympy(syms)
    candidates = [k for k in range(2, h.d + 1) if h.d % k == 0]
    if not candidates:
        return 1
    alive = set(candidates)
    for _ in range(lines):
        a = [sympy.Rational(int(rng.integers(-16, 17)), int(rng.integers(1, 17))) for _ in range(h.n)]
        b = [sympy.Rational(int(rng.integers(-16, 17)), int(rng.integers(1, 17))) for _ in range(h.n)]
        uni = sympy.expand(expr.subs({s: ai + t * bi for s, ai, bi in zip(syms, a, b)}, simultaneous=True))
        if uni == 0:
            continue
        poly = sympy.Poly(uni, t, extension=True)
        if poly.degree() <= 0:
            continue
        _, factors = sympy.sqf_list(poly)
        mults = [m for f, m in factors if f.degree() > 0]
        alive = {k for k in alive if all(m % k == 0 for m in mults)}
        if not alive:
            return 1
    return max(alive)


def is_basic(h: HomoPoly, lines: int = 20, seed: int = 0) -> bool:
    return perfect_power_exponent(h, lines, seed) == 1


def exact_point(values) -> list:
    """Coerce ints/Fractions/strings to exact scalars."""
    out = []
    for v in values:
        if isinstance(v, str):
            out.append(parse_constant(v))
        elif isinstance(v, ExactComplex):
            out.append(v)
        else:
            out.append(as_exact(v))
    return out
