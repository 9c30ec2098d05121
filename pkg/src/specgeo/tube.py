"""The tube domain over the cone of a homogeneous polynomial.

Points are pairs (X, Y) of real n-vectors standing for Z = X + iY.  The
Kähler potential is K = -(4/d) log h(Y), whose complex Hessian G does not
depend on X; the real metric on (dX, dY) coordinates is G (+) G.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import ConeExitError, PreconditionError
from .hypersurface import canonical_metric, project_to_level, tangent_basis
from .linalg import PseudoMetric, signature
from .numdiff import STEP, realify, wirtinger_hessian
from .poly import HomoPoly, log_hessian
from .scalar import sign

__all__ = [
    "TubePoint",
    "tube_metric",
    "tube_gram",
    "potential",
    "fd_metric",
    "fd_deviation",
    "Scaling",
    "Translation",
    "Reflection",
    "Inversion",
    "AffineMap",
    "Composite",
    "isometry_candidates",
    "check_pullback_isometry",
    "cone_product_check",
    "inversion_cone_deviation",
    "sample_cone_points",
    "sample_tube_points",
    "tube_signature",
]


@dataclass(frozen=True)
class TubePoint:
    X: tuple
    Y: tuple

    def __init__(self, X, Y):
        if len(X) != len(Y):
            raise ValueError("real and imaginary parts differ in length")
        object.__setattr__(self, "X", tuple(X))
        object.__setattr__(self, "Y", tuple(Y))

    @classmethod
    def from_complex(cls, Z):
        return cls([complex(z).real for z in Z], [complex(z).imag for z in Z])

    @property
    def n(self):
        return len(self.X)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(float(x), float(y)) for x, y in zip(self.X, self.Y)])

    def as_float(self) -> "TubePoint":
        return TubePoint([float(x) for x in self.X], [float(y) for y in self.Y])


def _require_cone(h: HomoPoly, Y):
    val = h.evaluate(list(Y))
    if sign(val) <= 0:
        raise ConeExitError(f"h(Y) = {float(val):.6g} <= 0, point is outside the tube domain")
    return val


def tube_gram(h: HomoPoly, Y) -> np.ndarray:
    """G = -(1/d) Hess_Y log h(Y) as a float n x n array."""
    _require_cone(h, Y)
    return -np.array(log_hessian(h, list(Y)).as_array()) / h.d


def tube_metric(h: HomoPoly, Z: TubePoint) -> PseudoMetric:
    """Real 2n x 2n metric G (+) G; exact entries when Y is exact."""
    _require_cone(h, Z.Y)
    L = log_hessian(h, list(Z.Y))
    n = h.n
    if L.exact:
        G = [[-x / h.d for x in row] for row in L.gram]
        zero = [[0] * n for _ in range(n)]
        gram = [G[i] + zero[i] for i in range(n)] + [zero[i] + G[i] for i in range(n)]
    else:
        G = -L.as_array() / h.d
        gram = np.block([[G, np.zeros((n, n))], [np.zeros((n, n)), G]])
    labels = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    return PseudoMetric(gram, labels)


def potential(h: HomoPoly, Y) -> float:
    val = _require_cone(h, Y)
    return -4.0 / h.d * math.log(float(val))


def _mp_potential(h: HomoPoly):
    coeffs = [(exp, mpmath.mpf(c.rational_part().numerator) / c.rational_part().denominator
               if c.is_rational() else mpmath.mpf(float(c))) for exp, c in h.monomials.items()]

    def K(xs, ys):
        acc = mpmath.mpf(0)
        for exp, c in coeffs:
            term = c
            for y, e in zip(ys, exp):
                if e:
                    term *= y ** e
            acc += term
        if acc <= 0:
            raise ConeExitError("finite-difference stencil left the cone")
        return -mpmath.mpf(4) / h.d * mpmath.log(acc)

    return K


def fd_metric(h: HomoPoly, Z: TubePoint, step: float = STEP) -> np.ndarray:
    """Real metric from finite-difference Wirtinger derivatives of the potential."""
    Zf = Z.as_float()
    W = wirtinger_hessian(_mp_potential(h), Zf.X, Zf.Y, step)
    return realify(W)


def fd_deviation(h: HomoPoly, Z: TubePoint, step: float = STEP, relative: bool = False) -> float:
    """max |FD metric - closed form|, optionally divided by max |closed form|."""
    closed = tube_metric(h, Z).as_array()
    dev = float(np.abs(fd_metric(h, Z, step) - closed).max())
    return dev / float(np.abs(closed).max()) if relative else dev


def tube_signature(h: HomoPoly, Y) -> tuple[int, int, int]:
    return signature(tube_metric(h, TubePoint([0] * h.n, Y)).gram)


# -- maps ---------------------------------------------------------------------
# Each map acts on float TubePoints and returns its real Jacobian in the
# (dX, dY) coordinates.

class _Map:
    name = "map"

    def apply(self, h: HomoPoly, Z: TubePoint) -> TubePoint:
        raise NotImplementedError

    def jacobian(self, h: HomoPoly, Z: TubePoint) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name}


class Scaling(_Map):
    name = "scaling"

    def __init__(self, lam: float = 2.0):
        if lam <= 0:
            raise ValueError("scaling factor must be positive")
        self.lam = lam

    def apply(self, h, Z):
        return TubePoint([self.lam * x for x in Z.X], [self.lam * y for y in Z.Y])

    def jacobian(self, h, Z):
        return self.lam * np.eye(2 * h.n)

    def describe(self):
        return {"name": self.name, "lambda": float(self.lam)}


class Translation(_Map):
    name = "translation"

    def __init__(self, X0: Sequence[float]):
        self.X0 = [float(x) for x in X0]

    def apply(self, h, Z):
        return TubePoint([x + t for x, t in zip(Z.X, self.X0)], Z.Y)

    def jacobian(self, h, Z):
        return np.eye(2 * h.n)

    def describe(self):
        return {"name": self.name, "X0": self.X0}


class Reflection(_Map):
    name = "reflection"

    def apply(self, h, Z):
        return TubePoint([-x for x in Z.X], Z.Y)

    def jacobian(self, h, Z):
        n = h.n
        return np.diag([-1.0] * n + [1.0] * n)


class Inversion(_Map):
    """X + iY -> X + i Y / h(Y)^(2/d)."""

    name = "inversion"

    def apply(self, h, Z):
        hv = float(_require_cone(h, Z.Y))
        f = hv ** (-2.0 / h.d)
        return TubePoint(Z.X, [f * float(y) for y in Z.Y])

    def jacobian(self, h, Z):
        n, d = h.n, h.d
        Y = [float(y) for y in Z.Y]
        hv = float(_require_cone(h, Y))
        grad = np.array([float(g.evaluate(Y)) for g in h.gradient_polys])
        D = hv ** (-2.0 / d) * (np.eye(n) - (2.0 / d) * np.outer(Y, grad) / hv)
        out = np.eye(2 * n)
        out[n:, n:] = D
        return out


class AffineMap(_Map):
    """Z -> lam * (A Z) + t with A real, preserving the cone."""

    name = "affine"

    def __init__(self, A, t=None, lam: float = 1.0):
        self.A = np.array([[float(a) for a in row] for row in A])
        n = self.A.shape[0]
        self.t = np.zeros(n) if t is None else np.array([float(x) for x in t])
        self.lam = float(lam)

    def apply(self, h, Z):
        X = self.lam * self.A @ np.array(Z.X, float) + self.t
        Y = self.lam * self.A @ np.array(Z.Y, float)
        return TubePoint(X.tolist(), Y.tolist())

    def jacobian(self, h, Z):
        n = h.n
        out = np.zeros((2 * n, 2 * n))
        out[:n, :n] = self.lam * self.A
        out[n:, n:] = self.lam * self.A
        return out

    def describe(self):
        return {"name": self.name, "A": self.A.tolist(), "t": self.t.tolist(), "lambda": self.lam}


class Composite(_Map):
    """maps[0] applied first."""

    name = "composite"

    def __init__(self, maps):
        self.maps = list(maps)

    def apply(self, h, Z):
        for m in self.maps:
            Z = m.apply(h, Z)
        return Z

    def jacobian(self, h, Z):
        J = np.eye(2 * h.n)
        for m in self.maps:
            J = m.jacobian(h, Z) @ J
            Z = m.apply(h, Z)
        return J

    def describe(self):
        return {"name": self.name, "maps": [m.describe() for m in self.maps]}


def isometry_candidates(n: int, lam: float = 2.0, X0=None) -> list:
    """Scaling, translation, reflection and inversion; X0 defaults to (3, -1, 3, ...)."""
    if X0 is None:
        X0 = [3.0 if i % 2 == 0 else -1.0 for i in range(n)]
    return [Scaling(lam), Translation(X0), Reflection(), Inversion()]


def check_pullback_isometry(h: HomoPoly, fmap: _Map, points: Sequence[TubePoint]) -> float:
    """max over points of |DF^T g_{F(Z)} DF - g_Z| (entrywise)."""
    worst = 0.0
    for Z in points:
        Zf = Z.as_float()
        W = fmap.apply(h, Zf)
        _require_cone(h, W.Y)
        J = fmap.jacobian(h, Zf)
        pulled = J.T @ tube_metric(h, W).as_array() @ J
        dev = float(np.abs(pulled - tube_metric(h, Zf).as_array()).max())
        worst = max(worst, dev)
    return worst


def inversion_cone_deviation(h: HomoPoly, Ys) -> dict:
    """Behaviour of the inversion on the imaginary cone iV.

    Returns the metric deviation restricted to the Y directions, the
    involution defect and the displacement of points on the unit level set.
    """
    inv = Inversion()
    iso = invol = fixed = 0.0
    n = h.n
    for Y in Ys:
        Z = TubePoint([0.0] * n, [float(y) for y in Y])
        W = inv.apply(h, Z)
        D = inv.jacobian(h, Z)[n:, n:]
        pulled = D.T @ tube_gram(h, W.Y) @ D
        iso = max(iso, float(np.abs(pulled - tube_gram(h, Z.Y)).max()))
        back = inv.apply(h, W)
        invol = max(invol, float(np.abs(np.array(back.Y) - np.array(Z.Y)).max()))
        P = TubePoint([0.0] * n, project_to_level(h, Z.Y))
        fixed = max(fixed, float(np.abs(np.array(inv.apply(h, P).Y) - np.array(P.Y, float)).max()))
    return {"cone_isometry": iso, "involution": invol, "fixes_level_set": fixed}


def cone_product_check(h: HomoPoly, samples) -> float:
    """Pull the tube metric back along (t, Y) -> i e^t Y and compare with dt^2 (+) g.

    ``samples`` are pairs (t, Y) with h(Y) = 1.
    """
    worst = 0.0
    for t, Y in samples:
        Yf = np.array([float(y) for y in Y])
        basis = [np.array([float(x) for x in v]) for v in tangent_basis(h, list(Y))]
        et = math.exp(t)
        G = tube_gram(h, (et * Yf).tolist())
        # d/dt (i e^t Y) = i e^t Y ; tangent v -> i e^t v
        frame = [et * Yf] + [et * v for v in basis]
        pulled = np.array([[a @ G @ b for b in frame] for a in frame])
        g = canonical_metric(h, [float(y) for y in Yf], [v.tolist() for v in basis]).as_array()
        expected = np.zeros_like(pulled)
        expected[0, 0] = 1.0
        expected[1:, 1:] = g
        worst = max(worst, float(np.abs(pulled - expected).max()))
    return worst


# -- sampling -----------------------------------------------------------------

def _segment_in_cone(h, A, B, floor, steps=8) -> bool:
    """h stays above floor * max|P|^d along the segment (keeps away from the boundary)."""
    for k in range(steps + 1):
        s = Fraction(k, steps)
        P = [a + s * (b - a) for a, b in zip(A, B)]
        val = h.evaluate(P)
        if sign(val) <= 0 or val < floor * max(abs(x) for x in P) ** h.d:
            return False
    return True


def sample_cone_points(h: HomoPoly, seed_point, count: int, rng, spread: Fraction = Fraction(1, 4),
                       margin: Fraction = Fraction(1, 4)) -> list:
    """Exact points of the cone near the seed, joined to it by a segment in the cone.

    Along the segment h(P) / max|P|^d stays above ``margin`` times its value at
    the seed, so samples keep a distance from the boundary of the cone.
    """
    seed = [Fraction(x) for x in seed_point]
    if sign(h.evaluate(seed)) <= 0:
        raise ConeExitError("seed point is not in the cone")
    scale = max(abs(x) for x in seed)
    floor = h.evaluate(seed) * (margin / scale ** h.d)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * max(count, 1):
            raise PreconditionError("could not sample the cone near the seed point")
        delta = [Fraction(int(rng.integers(-16, 17)), 16) * spread * scale for _ in seed]
        Y = [a + b for a, b in zip(seed, delta)]
        if _segment_in_cone(h, seed, Y, floor):
            out.append(Y)
    return out


def sample_tube_points(h: HomoPoly, seed_point, count: int, rng) -> list[TubePoint]:
    Ys = sample_cone_points(h, seed_point, count, rng)
    out = []
    for Y in Ys:
        X = [Fraction(int(rng.integers(-16, 17)), int(rng.integers(1, 17))) for _ in Y]
        out.append(TubePoint(X, Y))
    return out
