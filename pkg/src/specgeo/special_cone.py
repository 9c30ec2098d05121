"""Lagrangean cones in the cotangent space of C^(n+1) and the metrics they carry.

Coordinates on V = T*C^(n+1) are (z^0..z^n, p_0..p_n).  The symplectic form
is omega(X, Y) = X^T Omega Y with Omega = [[0, I], [-I, 0]], the real
structure is complex conjugation and gamma(X, Y) = i omega(X, conj Y).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    ImproperConeError,
    PoleError,
    PreconditionError,
    RouteMismatchError,
)
from .linalg import PseudoMetric, congruence_signature, signature
from .numdiff import STEP, realify, wirtinger_hessian
from .poly import HomoPoly, SymForm, polarize
from .scalar import I, ExactComplex, QSqrt, is_exact

__all__ = [
    "FundamentalData",
    "BasicFunction",
    "r_map",
    "gamma",
    "gamma_gram",
    "gamma_signature",
    "is_hermitian",
    "cone_metric_routes",
    "omega",
    "cone_metric",
    "lift",
    "lift_frame",
    "lagrangean_defect",
    "special_metric",
    "special_metric_matrix",
    "potential_KF",
    "ks_argument",
    "potential_Ks",
    "lemma4h_residual",
    "check_gc_equals_gs",
    "special_vs_tube_deviation",
    "special_metric_fd_deviation",
]


def _exact_vec(v) -> bool:
    return all(is_exact(x) for x in v)


def _conj(x):
    if isinstance(x, ExactComplex):
        return x.conjugate()
    if is_exact(x):
        return x
    return np.conj(x)


# -- fundamental data ---------------------------------------------------------

@dataclass(frozen=True)
class FundamentalData:
    """Standard symplectic structure on C^(2m), m = n + 1, with conjugation."""

    m: int

    @property
    def dim(self) -> int:
        return 2 * self.m

    def omega_matrix(self) -> list:
        m = self.m
        out = [[0] * (2 * m) for _ in range(2 * m)]
        for j in range(m):
            out[j][m + j] = 1
            out[m + j][j] = -1
        return out

    def witt_p(self, a: int) -> list:
        v = [0] * (2 * self.m)
        v[a] = 1
        return v

    def witt_q(self, b: int) -> list:
        v = [0] * (2 * self.m)
        v[self.m + b] = 1
        return v


def omega(u, v):
    if len(u) != len(v) or len(u) % 2:
        raise DimensionMismatch("omega needs two vectors of the same even length")
    m = len(u) // 2
    terms = [u[j] * v[m + j] - u[m + j] * v[j] for j in range(m)]
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def gamma(u, v):
    """i * omega(u, conj v); sesquilinear and Hermitian."""
    w = omega(u, [_conj(x) for x in v])
    if _exact_vec(u) and _exact_vec(v):
        return I * w
    return 1j * complex(w)


def gamma_gram(m: int) -> list:
    """Gram matrix gamma(e_a, e_b) = i Omega_ab, exact."""
    basis = [[1 if k == a else 0 for k in range(2 * m)] for a in range(2 * m)]
    return [[gamma(a, b) for b in basis] for a in basis]


def _real_form(M) -> list:
    """Real symmetric 2N x 2N matrix of the Hermitian form w^T M conj(w)."""
    N = len(M)
    A = [[ExactComplex._coerce(x).re if is_exact(x) else x.real for x in row] for row in M]
    B = [[ExactComplex._coerce(x).im if is_exact(x) else x.imag for x in row] for row in M]
    top = [A[i] + B[i] for i in range(N)]
    bot = [[-x for x in B[i]] + A[i] for i in range(N)]
    return top + bot


def gamma_signature(m: int) -> tuple[int, int, int]:
    """Hermitian signature of gamma on C^(2m), exact (real form counts halved)."""
    p, q, z = congruence_signature(_real_form(gamma_gram(m)))
    return p // 2, q // 2, z // 2


def is_hermitian(M) -> bool:
    N = len(M)
    return all(_conj(M[i][j]) == M[j][i] for i in range(N) for j in range(N))


# -- basic functions ----------------------------------------------------------

class BasicFunction:
    """Sum of Laurent monomials c * z^alpha (alpha may be negative), degree 2."""

    def __init__(self, m: int, terms: dict):
        self.m = m
        self.terms = {tuple(e): c for e, c in terms.items() if c}
        degs = {sum(e) for e in self.terms}
        if degs and degs != {2}:
            raise PreconditionError(f"a basic function is homogeneous of degree 2, got {sorted(degs)}")

    def _check(self, Z):
        if len(Z) != self.m:
            raise DimensionMismatch(f"expected {self.m} coordinates, got {len(Z)}")
        for e in self.terms:
            for z, k in zip(Z, e):
                if k < 0 and not (z if is_exact(z) else abs(complex(z)) > 0):
                    raise PoleError("evaluation on the pole set")

    @staticmethod
    def _power(Z, i, k, cache):
        key = (i, k)
        if key not in cache:
            z = Z[i]
            if k > 0:
                cache[key] = z ** k
            elif is_exact(z):
                cache[key] = ExactComplex(1) / ExactComplex._coerce(z) ** (-k)
            else:
                cache[key] = 1 / z ** (-k)
        return cache[key]

    def _eval_terms(self, terms, Z, cache=None):
        self._check(Z)
        cache = {} if cache is None else cache
        exact = _exact_vec(Z) and all(is_exact(c) for c in self.terms.values())
        acc = ExactComplex(0) if exact else 0j
        for e, c in terms:
            term = c if exact else complex(c)
            for i, k in enumerate(e):
                if k:
                    term = term * self._power(Z, i, k, cache)
            acc = acc + term
        return acc

    def __call__(self, Z):
        return self._eval_terms(self.terms.items(), Z)

    def _diff(self, terms, i):
        out = []
        for e, c in terms:
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out.append((tuple(e2), c * e[i]))
        return out

    def gradient(self, Z) -> list:
        items = list(self.terms.items())
        cache = {}
        return [self._eval_terms(self._diff(items, i), Z, cache) for i in range(self.m)]

    def hessian(self, Z) -> list:
        items = list(self.terms.items())
        grads = [self._diff(items, i) for i in range(self.m)]
        cache = {}
        out = [[None] * self.m for _ in range(self.m)]
        for i in range(self.m):
            for j in range(i, self.m):
                out[i][j] = out[j][i] = self._eval_terms(self._diff(grads[i], j), Z, cache)
        return out

    def mp_function(self):
        """Evaluator on mpmath complex lists, for finite differences."""
        terms = [(e, mpmath.mpc(complex(c))) for e, c in self.terms.items()]

        def f(Z):
            acc = mpmath.mpc(0)
            for e, c in terms:
                t = c
                for z, k in zip(Z, e):
                    if k:
                        t *= z ** k
                acc += t
            return acc

        return f


def r_map(h: HomoPoly, d: int | None = None) -> BasicFunction:
    """F_h(z) = h(z^1..z^n) / (z^0)^(d-2)."""
    d = h.d if d is None else d
    if d != h.d:
        raise PreconditionError(f"declared degree {d} does not match h (degree {h.d})")
    if d < 2:
        raise PreconditionError("the r-map needs degree >= 2")
    terms = {(-(d - 2),) + exp: c for exp, c in h.monomials.items()}
    return BasicFunction(h.n + 1, terms)


# -- the cone -----------------------------------------------------------------

def lift(F: BasicFunction, Z) -> list:
    return list(Z) + F.gradient(Z)


def lift_frame(F: BasicFunction, Z) -> list:
    """Columns (e_j, d^2F e_j) spanning the tangent space of the cone at the lift."""
    Hs = F.hessian(Z)
    exact = _exact_vec(Z)
    one, zero = (ExactComplex(1), ExactComplex(0)) if exact else (1 + 0j, 0j)
    cols = []
    for j in range(F.m):
        e = [one if k == j else zero for k in range(F.m)]
        cols.append(e + [Hs[k][j] for k in range(F.m)])
    return cols


def lagrangean_defect(F: BasicFunction, Z) -> float:
    """Largest |omega| between frame columns and between the lift and the frame."""
    cols = lift_frame(F, Z) + [lift(F, Z)]
    worst = 0.0
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            worst = max(worst, abs(complex(omega(cols[a], cols[b]))))
    return worst


def cone_metric(F: BasicFunction, Z, rtol: float = 1e-10) -> PseudoMetric:
    """2 Im d^2F(Z), checked against the gamma-pullback of the lift frame."""
    Hs = F.hessian(Z)
    cols = lift_frame(F, Z)
    m = F.m
    exact = _exact_vec(Z) and all(is_exact(c) for c in F.terms.values())
    if exact:
        formula = [[Hs[j][k].im * 2 for k in range(m)] for j in range(m)]
        pulled = [[gamma(cols[j], cols[k]) for k in range(m)] for j in range(m)]
        if any(pulled[j][k] != formula[j][k] for j in range(m) for k in range(m)):
            raise RouteMismatchError("cone metric formula and gamma-pullback disagree")
        gram = formula
    else:
        formula = 2 * np.imag(np.array(Hs, dtype=complex))
        pulled = np.array([[complex(gamma(cols[j], cols[k])) for k in range(m)] for j in range(m)])
        dev = float(np.abs(pulled - formula).max())
        if dev > rtol * max(1.0, float(np.abs(formula).max())):
            raise RouteMismatchError(f"cone metric routes disagree by {dev:.3e}")
        gram = formula.tolist()
    return PseudoMetric(gram, [f"z{j}" for j in range(m)])


def cone_metric_routes(F: BasicFunction, Z) -> float:
    """Deviation between the two routes (float)."""
    Hs = np.array([[complex(x) for x in row] for row in F.hessian(Z)])
    cols = lift_frame(F, Z)
    m = F.m
    pulled = np.array([[complex(gamma(cols[j], cols[k])) for k in range(m)] for j in range(m)])
    return float(np.abs(pulled - 2 * Hs.imag).max())


# -- special metric -----------------------------------------------------------

def special_metric(u, v, rtol: float = 1e-10):
    """gamma(v,v)/gamma(u,u) - |gamma(u,v)/gamma(u,u)|^2."""
    guu = gamma(u, u)
    exact = _exact_vec(u) and _exact_vec(v)
    norm = sum(abs(complex(x)) ** 2 for x in u)
    if abs(complex(guu)) <= rtol * max(norm, 1e-300):
        raise ImproperConeError("gamma(u, u) vanishes; the cone is not properly nondegenerate here")
    gvv = gamma(v, v)
    guv = gamma(u, v)
    if exact:
        a = guu.re
        r = guv / guu
        return gvv.re / a - (r.re * r.re + r.im * r.im)
    return complex(gvv).real / complex(guu).real - abs(complex(guv) / complex(guu)) ** 2


def special_metric_matrix(F: BasicFunction, w) -> np.ndarray:
    """Hermitian matrix of the special metric in the chart z^0 = 1, coordinates w."""
    Z = [1] + list(w) if _exact_vec(w) else [1 + 0j] + [complex(x) for x in w]
    u = [complex(x) for x in lift(F, Z)]
    cols = [[complex(x) for x in c] for c in lift_frame(F, Z)[1:]]
    guu = complex(gamma(u, u)).real
    n = len(cols)
    out = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            gjk = complex(gamma(cols[j], cols[k]))
            gju = complex(gamma(cols[j], u))
            guk = complex(gamma(u, cols[k]))
            out[j, k] = gjk / guu - gju * guk / guu ** 2
    return out


def potential_KF(F: BasicFunction, w) -> float:
    Z = [1 + 0j] + [complex(x) for x in w]
    u = lift(F, Z)
    return math.log(abs(complex(gamma(u, u)).real))


def special_metric_fd_deviation(F: BasicFunction, w, step: float = STEP) -> float:
    """Compare the special metric matrix with FD Wirtinger derivatives of log |gamma(lift, lift)|."""
    def gval(Z):
        # gamma(lift, lift) = i sum_j (z^j conj(F_j) - F_j conj(z^j)) = 2 Im(sum_j F_j conj z^j)
        grads = _mp_gradient(F, Z)
        acc = mpmath.mpc(0)
        for z, g in zip(Z, grads):
            acc += g * mpmath.conj(z)
        return 2 * mpmath.im(acc)

    def K(xs, ys):
        Z = [mpmath.mpc(1)] + [mpmath.mpc(x, y) for x, y in zip(xs, ys)]
        return mpmath.log(abs(gval(Z)))

    wf = [complex(x) for x in w]
    W = wirtinger_hessian(K, [z.real for z in wf], [z.imag for z in wf], step)
    S = special_metric_matrix(F, w)
    return float(np.abs(W - S).max())


def _mp_gradient(F: BasicFunction, Z):
    out = []
    for i in range(F.m):
        acc = mpmath.mpc(0)
        for e, c in F.terms.items():
            if not e[i]:
                continue
            t = mpmath.mpc(complex(c)) * e[i]
            for k, (z, p) in enumerate(zip(Z, e)):
                q = p - 1 if k == i else p
                if q:
                    t *= z ** q
            acc += t
        out.append(acc)
    return out


def special_vs_tube_deviation(h: HomoPoly, Y, X=None) -> dict:
    """Special metric of F_h at the chart point w = X + iY versus the tube metric.

    Returns the deviation from -(d/4) G together with the ratio measured on the
    radial direction.
    """
    from .tube import tube_gram

    n = h.n
    X = [0.0] * n if X is None else [float(x) for x in X]
    w = [complex(x, float(y)) for x, y in zip(X, Y)]
    S = special_metric_matrix(r_map(h), w)
    G = tube_gram(h, [float(y) for y in Y])
    expected = -(h.d / 4.0) * G
    Yf = np.array([float(y) for y in Y])
    ratio = float((Yf @ S.real @ Yf) / (Yf @ G @ Yf))
    return {"deviation": float(np.abs(S - expected).max()), "ratio": ratio,
            "signature": list(signature(S.real))}


# -- the potential K^s --------------------------------------------------------

def ks_argument(h: HomoPoly, Z, H: SymForm | None = None):
    """2 Im(-(d-2) H(Z,...,Z) + d H(Z,...,Z,conj Z))."""
    if H is None:
        H = polarize(h)
    d = h.d
    Zb = [_conj(z) for z in Z]
    a = H(*([Z] * d))
    b = H(*([Z] * (d - 1) + [Zb]))
    val = a * (-(d - 2)) + b * d
    if isinstance(val, ExactComplex):
        return val.im * 2
    if isinstance(val, QSqrt):
        return QSqrt()
    if isinstance(val, mpmath.mpc) or isinstance(val, mpmath.mpf):
        return 2 * mpmath.im(val)
    return 2 * complex(val).imag


def potential_Ks(h: HomoPoly, Z, H: SymForm | None = None) -> float:
    arg = ks_argument(h, Z, H)
    if float(arg) <= 0:
        raise DomainError("the argument of the logarithm is not positive")
    return -4.0 / h.d * math.log(float(arg))


def lemma4h_residual(h: HomoPoly, Z, H: SymForm | None = None):
    """Im(-H(Z,Z,Z) + 3 H(Z,Z,conj Z)) - 4 h(Im Z), exact for exact cubic data."""
    if h.d != 3:
        raise PreconditionError("the identity is stated for cubics")
    if H is None:
        H = polarize(h)
    Zb = [_conj(z) for z in Z]
    val = H(Z, Z, Z) * (-1) + H(Z, Z, Zb) * 3
    Y = [z.im if isinstance(z, ExactComplex) else complex(z).imag for z in Z]
    hy = h.evaluate(Y)
    if isinstance(val, ExactComplex):
        return val.im - 4 * hy
    return complex(val).imag - 4 * float(hy)


def check_gc_equals_gs(h: HomoPoly, points, step: float = STEP) -> dict:
    """FD metrics of K = -(4/3) log h(Y) and of K^s at tube points, plus the
    spread of K^s - K around -(4/3) log 8."""
    if h.d != 3:
        raise PreconditionError(f"the comparison is stated for cubic h, got degree {h.d}")
    from .tube import _mp_potential

    K = _mp_potential(h)
    grads = h.gradient_polys

    def Ks(xs, ys):
        # H(Z, Z, W) = (1/3) dh_Z(W), cheaper than the symmetric sum
        Z = [mpmath.mpc(x, y) for x, y in zip(xs, ys)]
        hz = h.evaluate(Z)
        dz = sum(g.evaluate(Z) * mpmath.conj(z) for g, z in zip(grads, Z))
        arg = 2 * mpmath.im(-hz + dz)
        if arg <= 0:
            raise DomainError("K^s undefined at this point")
        return -mpmath.mpf(4) / 3 * mpmath.log(arg)

    const = -4.0 / 3.0 * math.log(8.0)
    metric_dev = pot_dev = 0.0
    for Z in points:
        Zf = Z.as_float()
        W1 = realify(wirtinger_hessian(K, Zf.X, Zf.Y, step))
        W2 = realify(wirtinger_hessian(Ks, Zf.X, Zf.Y, step))
        metric_dev = max(metric_dev, float(np.abs(W1 - W2).max()))
        with mpmath.workdps(30):
            diff = Ks([mpmath.mpf(x) for x in Zf.X], [mpmath.mpf(y) for y in Zf.Y]) - \
                K([mpmath.mpf(x) for x in Zf.X], [mpmath.mpf(y) for y in Zf.Y])
            pot_dev = max(pot_dev, abs(float(diff) - const))
    return {"metric_deviation": metric_dev, "potential_deviation": pot_dev, "constant": const}
