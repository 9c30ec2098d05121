"""Metric Lie algebras with complex structure: elementary Kählerian algebras,
type-I normal J-algebras of rank two and three, and their verification.

Basis order for type-I algebras: H_1..H_l, G_1..G_l, then the x_ij^- blocks
in lexicographic (i, j), then the x_ij^+ blocks in the same order.  J sends
H_i to G_i, an x^- basis vector e to f = J e in x^+, and f back to -e.
"""
from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateMetricError,
    NotIsometricError,
    NotSpecialWarning,
    PreconditionError,
)
from .linalg import (
    ONE,
    ZERO,
    exact_matrix,
    inverse,
    matmul,
    matvec,
    nullspace,
    rank,
    row_reduce,
    signature,
    solve,
    transpose,
)
from .poly import BlockStructure, HomoPoly, log_hessian, multidegree_split, parse_constant
from .scalar import QSqrt, as_exact

__all__ = [
    "MetricLieAlgebra",
    "IsometricMap",
    "TypeIStructure",
    "build_elementary",
    "build_rank2",
    "build_u0_rank2",
    "build_u0_rank3",
    "verify_algebra",
    "invariance_check",
    "invariance_residuals",
    "orbit_rank",
    "pullback_metric_check",
    "forbidden_extension_residual",
    "type_one_checks",
    "load_isometric_map",
]

SQRT2 = QSqrt.sqrt(2)
INV_SQRT2 = SQRT2.inverse()


# -- the algebra --------------------------------------------------------------

class MetricLieAlgebra:
    """Structure constants on a basis, a Gram matrix and a complex structure.

    ``brackets[(i, j)]`` for i < j is a sparse dict k -> c^k_ij.  ``J`` is a
    matrix acting on coordinate columns.
    """

    def __init__(self, labels, brackets, gram, J):
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.brackets = {k: dict(v) for k, v in brackets.items() if v}
        self.gram = exact_matrix(gram)
        self.J = exact_matrix(J)

    def bracket_basis(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        return {k: -v for k, v in self.brackets.get((j, i), {}).items()}

    def bracket(self, u, v) -> list:
        out = [ZERO] * self.dim
        nzu = [(i, a) for i, a in enumerate(u) if a]
        nzv = [(j, b) for j, b in enumerate(v) if b]
        for i, a in nzu:
            for j, b in nzv:
                for k, c in self.bracket_basis(i, j).items():
                    out[k] = out[k] + a * b * c
        return out

    def ad(self, v) -> list:
        """Matrix of ad_v on coordinate columns."""
        cols = [self.bracket(v, self.unit(j)) for j in range(self.dim)]
        return transpose(cols)

    def unit(self, i: int) -> list:
        return [ONE if k == i else ZERO for k in range(self.dim)]

    def inner(self, u, v):
        return sum((u[i] * self.gram[i][j] * v[j] for i in range(self.dim) for j in range(self.dim)
                    if u[i] and v[j] and self.gram[i][j]), ZERO)

    def apply_J(self, v) -> list:
        return matvec(self.J, v)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "labels": self.labels,
            "brackets": [
                {"i": self.labels[i], "j": self.labels[j],
                 "value": {self.labels[k]: str(c) for k, c in sorted(v.items())}}
                for (i, j), v in sorted(self.brackets.items())
            ],
            "gram_signature": list(signature(self.gram)),
        }


class _Builder:
    def __init__(self, labels):
        self.labels = list(labels)
        self.index = {name: i for i, name in enumerate(self.labels)}
        self.brackets: dict = {}

    def set(self, a, b, value: dict):
        """[a, b] = value (a, b labels or indices; value label/index -> scalar)."""
        i = self.index[a] if isinstance(a, str) else a
        j = self.index[b] if isinstance(b, str) else b
        vec = {}
        for k, c in value.items():
            k = self.index[k] if isinstance(k, str) else k
            c = as_exact(c)
            if c:
                vec[k] = vec.get(k, ZERO) + c
        vec = {k: c for k, c in vec.items() if c}
        if i == j:
            if vec:
                raise ValueError("[X, X] must vanish")
            return
        if i > j:
            i, j = j, i
            vec = {k: -c for k, c in vec.items()}
        old = self.brackets.get((i, j))
        if old is not None and old != vec:
            raise ValueError(f"conflicting bracket for ({self.labels[i]}, {self.labels[j]})")
        if vec:
            self.brackets[(i, j)] = vec


# -- isometric maps -----------------------------------------------------------

@dataclass
class IsometricMap:
    """Bilinear psi: x23 x x12 -> x13 given by psi[a][b] = coordinate vector in x13."""

    gram23: list
    gram12: list
    gram13: list
    psi: list
    name: str = "psi"

    def __post_init__(self):
        self.gram23 = exact_matrix(self.gram23)
        self.gram12 = exact_matrix(self.gram12)
        self.gram13 = exact_matrix(self.gram13)
        self.psi = [[[as_exact(c) for c in vec] for vec in row] for row in self.psi]
        if len(self.psi) != self.order:
            raise ValueError("psi must have one row per basis vector of x23")
        for row in self.psi:
            if len(row) != self.n12 or any(len(v) != self.n13 for v in row):
                raise ValueError("psi coefficient array has the wrong shape")

    @property
    def order(self) -> int:
        return len(self.gram23)

    @property
    def n12(self) -> int:
        return len(self.gram12)

    @property
    def n13(self) -> int:
        return len(self.gram13)

    @property
    def special(self) -> bool:
        return self.n12 == self.n13

    @property
    def is_zero(self) -> bool:
        return not any(c for row in self.psi for v in row for c in v)

    def apply(self, X, Y) -> list:
        out = [ZERO] * self.n13
        for a, xa in enumerate(X):
            if not xa:
                continue
            for b, yb in enumerate(Y):
                if not yb:
                    continue
                for c, v in enumerate(self.psi[a][b]):
                    if v:
                        out[c] = out[c] + xa * yb * v
        return out

    def identity_residual(self) -> HomoPoly:
        """<psi(X,Y), psi(X,Y)> - <X,X><Y,Y> as a polynomial in (X, Y)."""
        n23, n12, n13 = self.order, self.n12, self.n13
        nv = n23 + n12
        X = [HomoPoly.variable(nv, a) for a in range(n23)]
        Y = [HomoPoly.variable(nv, n23 + b) for b in range(n12)]
        comps = [HomoPoly.zero(nv, 2) for _ in range(n13)]
        for a in range(n23):
            for b in range(n12):
                xy = X[a] * Y[b]
                for c in range(n13):
                    if self.psi[a][b][c]:
                        comps[c] = comps[c] + xy.scale(self.psi[a][b][c])
        lhs = HomoPoly.zero(nv, 4)
        for c in range(n13):
            for c2 in range(n13):
                if self.gram13[c][c2]:
                    lhs = lhs + (comps[c] * comps[c2]).scale(self.gram13[c][c2])
        qx = _quadratic(X, self.gram23, nv)
        qy = _quadratic(Y, self.gram12, nv)
        return lhs - qx * qy

    def is_isometric(self) -> bool:
        return not self.identity_residual()

    def transpose_coeffs(self) -> list:
        """psi^t[a][c] in x12 with <psi^t(e_a, e_c), Y> = <e_c, psi(e_a, Y)>."""
        g12inv = inverse(self.gram12) if self.n12 else []
        out = []
        for a in range(self.order):
            row = []
            for c in range(self.n13):
                r = [sum((self.gram13[c][c2] * self.psi[a][b][c2] for c2 in range(self.n13)), ZERO)
                     for b in range(self.n12)]
                row.append(matvec(g12inv, r) if self.n12 else [])
            out.append(row)
        return out

    def transpose(self) -> "IsometricMap":
        return IsometricMap(self.gram23, self.gram13, self.gram12, self.transpose_coeffs(),
                            name=self.name + "^t")

    def to_json(self) -> dict:
        def mat(M):
            return [[str(x) for x in row] for row in M]

        return {
            "name": self.name,
            "gram23": mat(self.gram23),
            "gram12": mat(self.gram12),
            "gram13": mat(self.gram13),
            "psi": [[[str(c) for c in v] for v in row] for row in self.psi],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsometricMap":
        def conv(x):
            return parse_constant(x) if isinstance(x, str) else as_exact(x)

        def mat(M):
            return [[conv(x) for x in row] for row in M]

        psi = [[[conv(c) for c in v] for v in row] for row in data.get("psi", [])]
        return cls(mat(data["gram23"]), mat(data["gram12"]), mat(data["gram13"]), psi,
                   name=data.get("name", "psi"))

    @classmethod
    def zero(cls, p: int, q: int, order: int = 0) -> "IsometricMap":
        eye = lambda k: [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        psi = [[[0] * q for _ in range(p)] for _ in range(order)]
        return cls(eye(order), eye(p), eye(q), psi, name=f"zero({order},{p},{q})")


def _quadratic(vars_, gram, nv) -> HomoPoly:
    acc = HomoPoly.zero(nv, 2)
    for a, va in enumerate(vars_):
        for b, vb in enumerate(vars_):
            if gram[a][b]:
                acc = acc + (va * vb).scale(gram[a][b])
    return acc


def load_isometric_map(path) -> IsometricMap:
    with open(path) as fh:
        return IsometricMap.from_json(json.load(fh))


# -- type-I structure ---------------------------------------------------------

@dataclass
class TypeIStructure:
    rank: int
    mu: list
    blocks: dict  # (i, j) -> dim, 1-based root indices
    H: list
    G: list
    xminus: dict  # (i, j) -> list of basis indices
    xplus: dict
    B0: list
    b: list = field(default_factory=list)
    Jb: list = field(default_factory=list)

    def b0_basis(self, L: MetricLieAlgebra) -> list:
        """Exact basis of the orthogonal complement of B0 inside b."""
        row = [[L.inner(self.B0, L.unit(i)) for i in self.b]]
        out = []
        for v in nullspace(row, len(self.b)):
            full = [ZERO] * L.dim
            for k, i in enumerate(self.b):
                full[i] = v[k]
            out.append(full)
        return out

    def JB0(self, L) -> list:
        return L.apply_J(self.B0)

    def jb_coords(self, v) -> list:
        return [v[i] for i in self.Jb]

    def block_structure(self) -> BlockStructure:
        """(a | x) blocks on the J b coordinates."""
        l = self.rank
        return BlockStructure([("a", range(l)), ("x", range(l, len(self.Jb)))])


def _type_one(mu, blocks, grams, names=None):
    """Builder pre-filled with the structure relations shared by all type-I algebras.

    ``blocks`` maps (i, j), 1 <= i < j <= l, to a block dimension; ``grams``
    maps the same keys to exact Gram matrices of x_ij^-.
    """
    l = len(mu)
    labels = [f"H{i + 1}" for i in range(l)] + [f"G{i + 1}" for i in range(l)]
    keys = sorted(k for k, v in blocks.items() if v)
    for sgn in ("-", "+"):
        for (i, j) in keys:
            labels += [f"x{i}{j}{sgn}_{a + 1}" for a in range(blocks[(i, j)])]
    B = _Builder(labels)
    H = list(range(l))
    G = list(range(l, 2 * l))
    xm, xp = {}, {}
    for (i, j) in keys:
        xm[(i, j)] = [B.index[f"x{i}{j}-_{a + 1}"] for a in range(blocks[(i, j)])]
        xp[(i, j)] = [B.index[f"x{i}{j}+_{a + 1}"] for a in range(blocks[(i, j)])]
    for i in range(l):
        B.set(H[i], G[i], {G[i]: mu[i]})
    for (i, j) in keys:
        mi, mj = as_exact(mu[i - 1]), as_exact(mu[j - 1])
        Hi, Hj, Gi, Gj = H[i - 1], H[j - 1], G[i - 1], G[j - 1]
        g = grams[(i, j)]
        for e, f in zip(xm[(i, j)], xp[(i, j)]):
            B.set(Hi, e, {e: mi / 2})
            B.set(Hi, f, {f: mi / 2})
            B.set(Hj, e, {e: -mj / 2})
            B.set(Hj, f, {f: mj / 2})
            B.set(Gj, e, {f: -mj})
        # [X, Y] = mu_i <JX, Y> G_i inside x_ij
        for a, e in enumerate(xm[(i, j)]):
            for b, f in enumerate(xp[(i, j)]):
                if g[a][b]:
                    B.set(e, f, {Gi: mi * g[a][b]})
    N = len(labels)
    J = [[ZERO] * N for _ in range(N)]
    for i in range(l):
        J[G[i]][H[i]] = ONE
        J[H[i]][G[i]] = -ONE
    for k in keys:
        for e, f in zip(xm[k], xp[k]):
            J[f][e] = ONE
            J[e][f] = -ONE
    gram = [[ZERO] * N for _ in range(N)]
    for i in range(2 * l):
        gram[i][i] = ONE
    for k in keys:
        g = grams[k]
        for idx in (xm[k], xp[k]):
            for a, r in enumerate(idx):
                for b, c in enumerate(idx):
                    gram[r][c] = as_exact(g[a][b])
    B0 = [ZERO] * N
    for i in range(l):
        B0[H[i]] = as_exact(mu[i]).inverse()
    b_idx = H + [i for k in keys for i in xm[k]]
    jb_idx = G + [i for k in keys for i in xp[k]]
    S = TypeIStructure(l, [as_exact(m) for m in mu], {k: blocks[k] for k in keys}, H, G, xm, xp, B0,
                       b_idx, jb_idx)
    return B, J, gram, S


def _eye(k, sign=1):
    return [[sign if i == j else 0 for j in range(k)] for i in range(k)]


def build_elementary(n: int, mu=1) -> MetricLieAlgebra:
    """The elementary Kählerian algebra of complex dimension n + 1."""
    mu = as_exact(mu)
    labels = ["H", "G"] + [f"e{a + 1}" for a in range(n)] + [f"f{a + 1}" for a in range(n)]
    B = _Builder(labels)
    B.set("H", "G", {"G": mu})
    for a in range(n):
        B.set("H", f"e{a + 1}", {f"e{a + 1}": mu / 2})
        B.set("H", f"f{a + 1}", {f"f{a + 1}": mu / 2})
        B.set(f"e{a + 1}", f"f{a + 1}", {"G": mu})
    N = len(labels)
    J = [[ZERO] * N for _ in range(N)]
    J[1][0] = ONE
    J[0][1] = -ONE
    for a in range(n):
        J[2 + n + a][2 + a] = ONE
        J[2 + a][2 + n + a] = -ONE
    return MetricLieAlgebra(labels, B.brackets, _eye(N), J)


def _rank2_poly(S: TypeIStructure, L: MetricLieAlgebra, s: int) -> HomoPoly:
    """a1 (mu a2)^s - 1/2 (mu a2)^(s-1) <X, X> on J b, mu = mu_2."""
    nv = len(S.Jb)
    mu = S.mu[1]
    a1 = HomoPoly.variable(nv, 0)
    ma2 = HomoPoly.variable(nv, 1).scale(mu)
    xs = [HomoPoly.variable(nv, 2 + k) for k in range(nv - 2)]
    idx = S.xplus.get((1, 2), [])
    g = [[L.gram[r][c] for c in idx] for r in idx]
    h = a1 * ma2 ** s
    if xs:
        h = h - (ma2 ** (s - 1) * _quadratic(xs, g, nv)).scale(Fraction(1, 2))
    return h


def build_rank2(mu1, mu2, p: int, x_sign: int = 1):
    """Rank-two type-I algebra with roots (mu1, mu2) and dim x12^- = p."""
    grams = {(1, 2): _eye(p, x_sign)}
    B, J, gram, S = _type_one([mu1, mu2], {(1, 2): p}, grams)
    L = MetricLieAlgebra(B.labels, B.brackets, gram, J)
    return L, S


def build_u0_rank2(p: int, s: int, x_sign: int = 1):
    """u0(p, s) with mu = (1, 1/sqrt(s)) and its invariant polynomial of degree s + 1.

    ``x_sign = -1`` flips the Gram matrix on the x block (pseudo-Euclidean variant).
    """
    if s < 1 or p < 0:
        raise ValueError("need p >= 0 and s >= 1")
    mu2 = QSqrt.sqrt(Fraction(1, s))
    L, S = build_rank2(1, mu2, p, x_sign)
    return L, S, _rank2_poly(S, L, s)


def build_u0_rank3(psi: IsometricMap, check: bool = True):
    """u0(psi) with mu = (1, 1, 1) and the cubic on J b."""
    if check and not psi.is_isometric():
        raise NotIsometricError(f"{psi.name} is not isometric")
    if not psi.is_zero and not psi.special:
        warnings.warn(f"{psi.name} is neither special nor of order zero", NotSpecialWarning, stacklevel=2)
    blocks = {(1, 2): psi.n12, (1, 3): psi.n13, (2, 3): psi.order}
    grams = {(1, 2): psi.gram12, (1, 3): psi.gram13, (2, 3): psi.gram23}
    B, J, gram, S = _type_one([1, 1, 1], blocks, grams)
    xm, xp = S.xminus, S.xplus
    e23, f23 = xm.get((2, 3), []), xp.get((2, 3), [])
    e12, f12 = xm.get((1, 2), []), xp.get((1, 2), [])
    e13, f13 = xm.get((1, 3), []), xp.get((1, 3), [])
    pt = psi.transpose_coeffs()
    for a in range(psi.order):
        for b in range(psi.n12):
            vec = psi.psi[a][b]
            B.set(e23[a], e12[b], {e13[c]: INV_SQRT2 * v for c, v in enumerate(vec) if v})
            B.set(f23[a], e12[b], {f13[c]: INV_SQRT2 * v for c, v in enumerate(vec) if v})
        for c in range(psi.n13):
            w = pt[a][c]
            B.set(e23[a], f13[c], {f12[b]: -INV_SQRT2 * v for b, v in enumerate(w) if v})
            B.set(f23[a], e13[c], {f12[b]: INV_SQRT2 * v for b, v in enumerate(w) if v})
    L = MetricLieAlgebra(B.labels, B.brackets, gram, J)
    return L, S, _rank3_poly(S, psi)


def _rank3_poly(S: TypeIStructure, psi: IsometricMap) -> HomoPoly:
    """a1 a2 a3 - 1/2 sum a_alpha <X_bc, X_bc> + (1/sqrt 2) <psi(J X23, J X12), J X13>."""
    nv = len(S.Jb)
    pos = {idx: k for k, idx in enumerate(S.Jb)}
    a = [HomoPoly.variable(nv, k) for k in range(3)]

    def block_vars(key):
        return [HomoPoly.variable(nv, pos[i]) for i in S.xplus.get(key, [])]

    X12, X13, X23 = block_vars((1, 2)), block_vars((1, 3)), block_vars((2, 3))
    h = a[0] * a[1] * a[2]
    quad = HomoPoly.zero(nv, 3)
    for alpha, key, X, g in ((0, (2, 3), X23, psi.gram23), (1, (1, 3), X13, psi.gram13),
                             (2, (1, 2), X12, psi.gram12)):
        if X:
            quad = quad + a[alpha] * _quadratic(X, g, nv)
    h = h - quad.scale(Fraction(1, 2))
    # J on x^+ coordinates is -1 times the matching x^- coordinate
    cubic = HomoPoly.zero(nv, 3)
    for i in range(psi.order):
        for j in range(psi.n12):
            for c in range(psi.n13):
                v = psi.psi[i][j][c]
                if not v:
                    continue
                for c2 in range(psi.n13):
                    if psi.gram13[c][c2]:
                        cubic = cubic + (X23[i] * X12[j] * X13[c2]).scale(-v * psi.gram13[c][c2])
    return h + cubic.scale(INV_SQRT2)


# -- verification -------------------------------------------------------------

def _jacobi_defect(L: MetricLieAlgebra) -> list:
    bad = []
    N = L.dim
    for i, j, k in itertools.combinations(range(N), 3):
        acc: dict = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for m, x in L.bracket_basis(a, b).items():
                for r, y in L.bracket_basis(m, c).items():
                    acc[r] = acc.get(r, ZERO) + x * y
        if any(v for v in acc.values()):
            bad.append((L.labels[i], L.labels[j], L.labels[k]))
    return bad


def _derived_series(L: MetricLieAlgebra) -> list[int]:
    span = [L.unit(i) for i in range(L.dim)]
    dims = [L.dim]
    while True:
        prods = [L.bracket(u, v) for u, v in itertools.combinations(span, 2)]
        prods = [p for p in prods if any(p)]
        if not prods:
            dims.append(0)
            return dims
        pivots, reduced = row_reduce([{k: x for k, x in enumerate(p) if x} for p in prods])
        dims.append(len(pivots))
        if len(pivots) == dims[-2]:
            return dims
        span = [[r.get(k, ZERO) for k in range(L.dim)] for r in reduced]


def _levi_civita(L: MetricLieAlgebra):
    """Christoffel vectors nabla_{e_i} e_j from the Koszul formula."""
    N = L.dim
    ginv = inverse(L.gram)
    ads = [L.ad(L.unit(i)) for i in range(N)]
    adT_g = [matmul(transpose(ads[i]), L.gram) for i in range(N)]
    nab = {}
    for i in range(N):
        for j in range(N):
            cij = [L.bracket_basis(i, j).get(k, ZERO) for k in range(N)]
            v = matvec(L.gram, cij)
            t1 = [row[i] for row in adT_g[j]]
            t2 = [row[j] for row in adT_g[i]]
            v = [a - b - c for a, b, c in zip(v, t1, t2)]
            nab[(i, j)] = [x * Fraction(1, 2) for x in matvec(ginv, v)]
    return nab


def verify_algebra(L: MetricLieAlgebra) -> dict:
    """Itemized axiom checks; every entry holds a bool and a detail."""
    N = L.dim
    out = {}
    bad = _jacobi_defect(L)
    out["jacobi"] = {"ok": not bad, "failures": [list(t) for t in bad[:5]]}

    J = L.J
    JJ = matmul(J, J)
    sq = all(JJ[i][j] == (-ONE if i == j else ZERO) for i in range(N) for j in range(N))
    orth = matmul(matmul(transpose(J), L.gram), J) == L.gram
    out["complex_structure"] = {"ok": bool(sq and orth), "J_squared": sq, "orthogonal": orth}

    series = _derived_series(L)
    out["solvable"] = {"ok": series[-1] == 0, "derived_series": series}

    rows, rhs = [], []
    for i, j in itertools.combinations(range(N), 2):
        rows.append(L.bracket_basis(i, j))
        rhs.append(-L.inner(L.unit(i), L.apply_J(L.unit(j))))
    sol = solve(rows, rhs, N)
    out["normal_one_form"] = {"ok": sol is not None,
                              "omega": None if sol is None else [str(x) for x in sol],
                              "error": None if sol is not None else "NotNormal"}

    nab = _levi_civita(L)
    worst = []
    for i in range(N):
        for j in range(N):
            # (nabla_i J) e_j = nabla_i (J e_j) - J nabla_i e_j
            Jej = [J[k][j] for k in range(N)]
            lhs = [ZERO] * N
            for k, c in enumerate(Jej):
                if c:
                    lhs = [a + c * b for a, b in zip(lhs, nab[(i, k)])]
            rhs_v = matvec(J, nab[(i, j)])
            if any(a != b for a, b in zip(lhs, rhs_v)):
                worst.append((L.labels[i], L.labels[j]))
    out["parallel_J"] = {"ok": not worst, "failures": [list(t) for t in worst[:5]]}

    rng = np.random.default_rng(0)
    ads = [np.array([[float(x) for x in row] for row in L.ad(L.unit(i))]) for i in range(N)]
    imag = 0.0
    for A in ads + [sum(c * A for c, A in zip(rng.normal(size=N), ads))]:
        ev = np.linalg.eigvals(A)
        imag = max(imag, float(np.abs(ev.imag).max()) if ev.size else 0.0)
    out["real_ad_spectrum"] = {"ok": imag < 1e-9, "max_imag": imag, "numeric": True}
    out["ok"] = all(v["ok"] for v in out.values() if isinstance(v, dict))
    return out


def type_one_checks(L: MetricLieAlgebra, S: TypeIStructure) -> dict:
    """J b is an abelian ideal, b and J b are orthogonal, ad_B0 = id on J b, ad_X JB0 = JX on b."""
    abelian = all(not L.bracket_basis(i, j) for i in S.Jb for j in S.Jb)
    jb = set(S.Jb)
    ideal = all(set(L.bracket_basis(i, j)) <= jb for i in range(L.dim) for j in S.Jb)
    orth = all(not L.gram[i][j] for i in S.b for j in S.Jb)
    adB0 = L.ad(S.B0)
    identity = all(adB0[r][c] == (ONE if r == c else ZERO) for c in S.Jb for r in range(L.dim))
    JB0 = S.JB0(L)
    moves = all(L.bracket(L.unit(x), JB0) == L.apply_J(L.unit(x)) for x in S.b)
    B0B0 = L.inner(S.B0, S.B0)
    return {"abelian_ideal": abelian and ideal, "orthogonal_split": orth, "adB0_identity_on_Jb": identity,
            "adX_JB0_equals_JX": moves, "B0_norm": str(B0B0),
            "ok": abelian and ideal and orth and identity and moves}


def _ad_on_jb(L: MetricLieAlgebra, S: TypeIStructure, Y) -> list:
    """Matrix of ad_Y restricted to J b, in J b coordinates."""
    pos = {idx: k for k, idx in enumerate(S.Jb)}
    n = len(S.Jb)
    M = [[ZERO] * n for _ in range(n)]
    for c, j in enumerate(S.Jb):
        img = L.bracket(Y, L.unit(j))
        for k, v in enumerate(img):
            if v:
                if k not in pos:
                    raise PreconditionError("J b is not an ideal")
                M[pos[k]][c] = v
    return M


def invariance_residuals(L, S, h: HomoPoly, Ys=None) -> list[HomoPoly]:
    """(ad*_Y h)(eta) = -dh|eta(ad_Y eta) for each Y (default: a basis of b0)."""
    if Ys is None:
        Ys = S.b0_basis(L)
    n = h.n
    out = []
    for Y in Ys:
        M = _ad_on_jb(L, S, Y)
        acc = HomoPoly.zero(n, h.d)
        for i in range(n):
            lin_coeffs = M[i]
            if not any(lin_coeffs):
                continue
            lin = HomoPoly.linear(lin_coeffs)
            acc = acc + h.gradient_polys[i] * lin
        out.append(-acc)
    return out


def invariance_check(L, S, h: HomoPoly):
    """Largest coefficient of any residual; exact zero means invariant."""
    worst = ZERO
    for R in invariance_residuals(L, S, h):
        for c in R.monomials.values():
            if abs(c) > worst:
                worst = abs(c)
    return worst


def forbidden_extension_residual(p: int = 1):
    """Rank two with mu = (1, sqrt 2), candidate h = a1^2 a2 - (1/sqrt 2) a1 <X, X>.

    Returns (residual (0,3)-component for Y = first x^- vector, expected
    (1/sqrt 2) <JY, X> <X, X>).
    """
    L, S = build_rank2(1, SQRT2, p)
    nv = len(S.Jb)
    a1, a2 = HomoPoly.variable(nv, 0), HomoPoly.variable(nv, 1)
    xs = [HomoPoly.variable(nv, 2 + k) for k in range(p)]
    q = _quadratic(xs, _eye(p), nv)
    h = a1 * a1 * a2 - (a1 * q).scale(INV_SQRT2)
    Y = L.unit(S.xminus[(1, 2)][0])
    R = invariance_residuals(L, S, h, [Y])[0]
    parts = multidegree_split(R, S.block_structure())
    got = parts.get((0, 3), HomoPoly.zero(nv, 3))
    # <JY, X> with X = sum c_b f_b is the coordinate of f_1
    expected = (xs[0] * q).scale(INV_SQRT2)
    return got, expected


def orbit_rank(L, S) -> int:
    JB0 = S.JB0(L)
    cols = [S.jb_coords(L.bracket(X, JB0)) for X in S.b0_basis(L)]
    return rank(cols) if cols else 0


def pullback_metric_check(L, S, h: HomoPoly) -> dict:
    """Tube metric at i JB0 pulled back through the orbit map versus (1/d) <,>.

    The differential at the identity sends X = X_b + X_Jb to
    X_Jb + i ad_{X_b} JB0.
    """
    d = h.d
    JB0 = S.JB0(L)
    p0 = S.jb_coords(JB0)
    val = h.evaluate(p0)
    if not val:
        raise DegenerateMetricError("h vanishes at JB0")
    hn = h.scale(val.inverse())
    G = [[-x / d for x in row] for row in log_hessian(hn, p0).gram]
    if signature(G)[2]:
        raise DegenerateMetricError("canonical metric at JB0 is degenerate")
    bset = set(S.b)
    N = L.dim
    re, im = [], []
    for i in range(N):
        if i in bset:
            re.append([ZERO] * len(S.Jb))
            im.append(S.jb_coords(L.bracket(L.unit(i), JB0)))
        else:
            re.append(S.jb_coords(L.unit(i)))
            im.append([ZERO] * len(S.Jb))

    def q(u, v):
        return sum((u[a] * G[a][b] * v[b] for a in range(len(u)) for b in range(len(v))
                    if u[a] and v[b] and G[a][b]), ZERO)

    worst = 0.0
    exact_ok = True
    for i in range(N):
        for j in range(N):
            pulled = q(re[i], re[j]) + q(im[i], im[j])
            expected = L.gram[i][j] * Fraction(1, d)
            diff = pulled - expected
            if diff:
                exact_ok = False
                worst = max(worst, abs(float(diff)))
    B0im = S.jb_coords(L.bracket(S.B0, JB0))
    radial = q(B0im, B0im)
    return {"deviation": worst, "exact": exact_ok, "degree": d,
            "radial_length": str(radial), "metric_signature": list(signature(G))}
