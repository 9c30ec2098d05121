"""Level sets of a homogeneous polynomial and their canonical metric."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatch,
    NonpositiveLevelError,
    NullBasePointError,
    PreconditionError,
    RouteMismatchError,
    ZeroLevelError,
)
from .linalg import PseudoMetric, bilinear, nullspace, signature
from .poly import HomoPoly, SymForm, gradient, hessian, log_hessian, polarize
from .scalar import QSqrt, is_exact, sign

__all__ = [
    "HypersurfacePoint",
    "project_to_level",
    "tangent_basis",
    "canonical_form",
    "canonical_metric",
    "metric_routes",
    "normalize_level",
    "sphere_symmetry",
    "pseudo_sphere_quadric",
    "automorphism_deviation",
    "symmetry_pullback_deviation",
    "pseudo_sphere_signature",
]

FLOAT_RTOL = 1e-10


def _is_exact_point(X) -> bool:
    return all(is_exact(x) for x in X)


def _exact_root(q: Fraction, d: int):
    """Exact d-th root of a positive rational if it is rational (or a square root)."""
    num = round(q.numerator ** (1.0 / d))
    den = round(q.denominator ** (1.0 / d))
    for a in (num - 1, num, num + 1):
        for b in (den - 1, den, den + 1):
            if a > 0 and b > 0 and Fraction(a, b) ** d == q:
                return QSqrt.rational(Fraction(a, b))
    if d == 2:
        return QSqrt.sqrt(q)
    return None


def project_to_level(h: HomoPoly, X):
    """Ray projection X / h(X)^(1/d) onto the level set h = 1.

    The result is exact whenever the d-th root of h(X) is rational (or d = 2
    and h(X) rational), otherwise it is a float vector.
    """
    val = h.evaluate(X)
    if sign(val) <= 0:
        raise NonpositiveLevelError(f"h(X) = {val} is not positive")
    if _is_exact_point(X) and isinstance(val, QSqrt) and val.is_rational():
        root = _exact_root(val.rational_part(), h.d)
        if root is not None:
            inv = root.inverse()
            return [inv * x for x in X]
    s = float(val) ** (1.0 / h.d)
    return [float(x) / s for x in X]


def normalize_level(h: HomoPoly, X0) -> HomoPoly:
    """Rescale h so that X0 lies on its unit level set (h -> h / h(X0))."""
    val = h.evaluate(X0)
    if not is_exact(val):
        raise PreconditionError("exact rescaling needs an exact base point")
    if sign(val) <= 0:
        raise NonpositiveLevelError(f"h(X0) = {val} is not positive")
    return h.scale(val.inverse())


def tangent_basis(h: HomoPoly, X0) -> list:
    """Basis of ker dh|X0.  Exact points give exact vectors ordered by free column."""
    grad = gradient(h, X0)
    if _is_exact_point(X0):
        if not any(grad):
            raise ZeroLevelError("gradient vanishes; the level set is singular here")
        return nullspace([grad])
    g = np.array([float(x) for x in grad])
    if not np.any(g):
        raise ZeroLevelError("gradient vanishes; the level set is singular here")
    _, _, vt = np.linalg.svd(g[None, :])
    return [list(row) for row in vt[1:]]


def canonical_form(h: HomoPoly, X0, u, v, H: SymForm | None = None):
    """-(d-1) H(X0, ..., X0, u, v)."""
    if H is None:
        H = polarize(h)
    args = [X0] * (h.d - 2) + [u, v]
    return H(*args) * (-(h.d - 1))


def metric_routes(h: HomoPoly, X0, basis):
    """Gram matrices of the three routes (polarization, Hessian, log-Hessian) and an exactness flag."""
    H = polarize(h)
    k = len(basis)
    pol = [[canonical_form(h, X0, basis[i], basis[j], H) for j in range(k)] for i in range(k)]
    hs = hessian(h, X0).gram
    lh = log_hessian(h, X0).gram
    exact = _is_exact_point(X0) and all(_is_exact_point(b) for b in basis)
    scale = Fraction(-1, h.d) if exact else -1.0 / h.d
    hes = [[bilinear(hs, basis[i], basis[j]) * scale if exact else
            float(np.asarray(basis[i], float) @ np.array(hs, float) @ np.asarray(basis[j], float)) * scale
            for j in range(k)] for i in range(k)]
    log = [[bilinear(lh, basis[i], basis[j]) * scale if exact else
            float(np.asarray(basis[i], float) @ np.array(lh, float) @ np.asarray(basis[j], float)) * scale
            for j in range(k)] for i in range(k)]
    return pol, hes, log, exact


def canonical_metric(h: HomoPoly, X0, basis=None, rtol: float = FLOAT_RTOL) -> PseudoMetric:
    """Canonical metric of the unit level set at X0, restricted to a tangent basis.

    Computed three ways (polarization, Hessian of h, Hessian of log h) and
    required to agree; disagreement is an internal error.
    """
    if h.d < 2:
        raise PreconditionError("the canonical metric needs degree >= 2")
    if len(X0) != h.n:
        raise DimensionMismatch("point and polynomial dimensions differ")
    val = h.evaluate(X0)
    if _is_exact_point(X0):
        if val != 1:
            raise PreconditionError(f"base point must satisfy h(X0) = 1, got {val}")
    elif abs(float(val) - 1.0) > 1e-12:
        raise PreconditionError(f"base point must satisfy h(X0) = 1, got {val}")
    if basis is None:
        basis = tangent_basis(h, X0)
    pol, hes, log, exact = metric_routes(h, X0, basis)
    if exact:
        if pol != hes or pol != log:
            raise RouteMismatchError("metric routes disagree on exact data")
        gram = pol
    else:
        P = np.array(pol, dtype=float)
        scale = max(1.0, float(np.abs(P).max()))
        for other in (hes, log):
            dev = float(np.abs(P - np.array(other, dtype=float)).max())
            if dev > rtol * scale:
                raise RouteMismatchError(f"metric routes disagree by {dev:.3e}")
        gram = P.tolist()
    return PseudoMetric(gram, [f"t{i + 1}" for i in range(len(basis))])


@dataclass
class HypersurfacePoint:
    """A point of the unit level set together with a tangent basis."""

    h: HomoPoly
    X0: list
    tangent_basis: list = field(default=None)

    def __post_init__(self):
        if self.tangent_basis is None:
            self.tangent_basis = tangent_basis(self.h, self.X0)

    @classmethod
    def from_seed(cls, h: HomoPoly, X) -> "HypersurfacePoint":
        return cls(h, project_to_level(h, X))

    def metric(self) -> PseudoMetric:
        return canonical_metric(self.h, self.X0, self.tangent_basis)

    def to_json(self) -> dict:
        m = self.metric()
        exact = m.exact
        return {
            "point": [str(x) if exact else float(x) for x in self.X0],
            "signature": list(m.signature),
            "gram": m.to_json()["gram"],
            "routes_agree": True,
        }


# -- automorphisms ------------------------------------------------------------

def automorphism_deviation(h: HomoPoly, A, X0, basis=None) -> float:
    """max |g_{A X0}(A u, A v) - g_{X0}(u, v)| over a tangent basis.

    Requires A^* h = h exactly.
    """
    if h.compose_linear(A) != h:
        raise PreconditionError("A does not preserve h")
    if basis is None:
        basis = tangent_basis(h, X0)
    H = polarize(h)

    def apply(v):
        return [sum((a * x for a, x in zip(row, v)), QSqrt()) if _is_exact_point(v) else
                sum(float(a) * float(x) for a, x in zip(row, v)) for row in A]

    AX0 = apply(X0)
    dev = 0.0
    for u in basis:
        for v in basis:
            a = canonical_form(h, AX0, apply(u), apply(v), H)
            b = canonical_form(h, X0, u, v, H)
            dev = max(dev, abs(float(a - b)))
    return dev


# -- pseudo-spheres -----------------------------------------------------------

def pseudo_sphere_quadric(k: int, l: int) -> HomoPoly:
    """sum_{i<k} x_i^2 - sum_{j>=k} x_j^2 in k + l variables."""
    n = k + l
    mons = {}
    for i in range(n):
        e = [0] * n
        e[i] = 2
        mons[tuple(e)] = 1 if i < k else -1
    return HomoPoly(n, mons, 2)


def sphere_symmetry(q: HomoPoly, X0, X):
    """Reflection through the line of X0: -X + 2 (<X,X0>/<X0,X0>) X0."""
    if q.d != 2:
        raise PreconditionError("the symmetry is defined for quadratic forms")
    Q = polarize(q)
    n00 = Q(X0, X0)
    exact = _is_exact_point(X0) and _is_exact_point(X)
    if (not n00) if exact else abs(float(n00)) < 1e-14:
        raise NullBasePointError("base point is null for the quadratic form")
    c = Q(X, X0) / n00
    if exact:
        return [-x + 2 * c * x0 for x, x0 in zip(X, X0)]
    c = float(c)
    return [-float(x) + 2 * c * float(x0) for x, x0 in zip(X, X0)]


def symmetry_pullback_deviation(q: HomoPoly, X0) -> float:
    """The symmetry at X0 is linear and fixes X0; compare the metric before and after."""
    basis = tangent_basis(q, X0)
    H = polarize(q)
    dev = 0.0
    for u in basis:
        for v in basis:
            su = sphere_symmetry(q, X0, u)
            sv = sphere_symmetry(q, X0, v)
            a = canonical_form(q, X0, su, sv, H)
            b = canonical_form(q, X0, u, v, H)
            dev = max(dev, abs(float(a - b)))
    return dev


def pseudo_sphere_signature(k: int, l: int) -> tuple[int, int, int]:
    q = pseudo_sphere_quadric(k, l)
    e1 = [1] + [0] * (k + l - 1)
    return signature(canonical_metric(q, e1).gram)
