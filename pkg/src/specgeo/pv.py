"""Invariant polynomials of key-algebra sums and checks on prehomogeneous modules."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .errors import UnimplementedEntry
from .linalg import ZERO, det, rank
from .poly import BlockStructure, HomoPoly, multidegree_split
from .scalar import as_exact, is_exact

__all__ = [
    "RootData",
    "invariant_exponents",
    "invariant_monomial",
    "normalize_roots",
    "enumerate_key_solutions",
    "swap_equivalent",
    "CatalogEntry",
    "catalog",
    "get_entry",
    "infinitesimal_invariance",
    "euler_residual",
    "closed_form_deviation",
    "regularity_check",
    "hessian_determinant",
    "orbit_dimension",
    "monomial_structure",
    "pfaffian_ratio",
]


# -- key algebras -------------------------------------------------------------

@dataclass(frozen=True)
class RootData:
    """Squared roots mu_j^2 as reduced positive fractions, the first equal to 1."""

    mu2: tuple

    def __init__(self, mu2: Sequence):
        vals = tuple(Fraction(x) for x in mu2)
        if not vals or vals[0] != 1:
            raise ValueError("the first squared root must be 1")
        if any(v <= 0 for v in vals):
            raise ValueError("squared roots must be positive")
        object.__setattr__(self, "mu2", vals)

    @property
    def rank(self) -> int:
        return len(self.mu2)


def invariant_exponents(R: RootData) -> tuple[tuple[int, ...], int, int]:
    """Exponents e_j = q_j prod_{k != j} p_k / N of the invariant monomial, N and the degree."""
    p = [m.numerator for m in R.mu2]
    q = [m.denominator for m in R.mu2]
    w = [q[j] * math.prod(p[k] for k in range(len(p)) if k != j) for j in range(len(p))]
    N = reduce(math.gcd, w)
    e = tuple(x // N for x in w)
    return e, N, sum(e)


def invariant_monomial(R: RootData) -> HomoPoly:
    e, _, d = invariant_exponents(R)
    return HomoPoly(R.rank, {e: 1}, d)


def normalize_roots(mu2: Sequence) -> tuple:
    """Divide by the smallest squared root and sort, so the first entry is 1."""
    vals = [Fraction(x) for x in mu2]
    m = min(vals)
    return tuple(sorted(v / m for v in vals))


def _monomial_text(e) -> str:
    parts = []
    for j, k in enumerate(e):
        if k == 1:
            parts.append(f"a{j + 1}")
        elif k > 1:
            parts.append(f"a{j + 1}^{k}")
    return "*".join(parts)


def enumerate_key_solutions(d_max: int) -> list[dict]:
    """Rank and squared-root tuples whose invariant monomial has degree <= d_max.

    Squared roots range over reduced fractions p/q with p, q <= d_max; tuples
    are normalized before deduplication.
    """
    if d_max < 2:
        raise ValueError("d_max must be at least 2")
    fracs = sorted({Fraction(p, q) for p in range(1, d_max + 1) for q in range(1, d_max + 1)})
    seen = {}
    for l in range(2, d_max + 1):
        for rest in itertools.combinations_with_replacement(fracs, l - 1):
            key = normalize_roots((Fraction(1),) + rest)
            if key in seen:
                continue
            e, N, d = invariant_exponents(RootData(key))
            if d <= d_max:
                seen[key] = {"d": d, "rank": l, "mu2": [str(x) for x in key],
                             "exponents": list(e), "poly": _monomial_text(e)}
    return sorted(seen.values(), key=lambda r: (r["d"], r["rank"], r["mu2"]))


def swap_equivalent(h1: HomoPoly, h2: HomoPoly) -> list | None:
    """A variable permutation taking h1 to h2, or None."""
    if h1.n != h2.n or h1.d != h2.d:
        return None
    for perm in itertools.permutations(range(h1.n)):
        A = [[1 if perm[i] == j else 0 for j in range(h1.n)] for i in range(h1.n)]
        if h1.compose_linear(A) == h2:
            return list(perm)
    return None


# -- catalog ------------------------------------------------------------------

@dataclass
class CatalogEntry:
    name: str
    dim: int
    degree: int
    poly: HomoPoly | None
    action: list | None  # exact dim x dim matrices for a basis of the Lie algebra
    reference: list | None
    closed_form: Callable | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def implemented(self) -> bool:
        return self.poly is not None

    def require(self):
        if not self.implemented:
            raise UnimplementedEntry(f"{self.name} is recorded as metadata only")
        return self

    def describe(self) -> dict:
        return {"name": self.name, "dim": self.dim, "degree": self.degree,
                "implemented": self.implemented, **self.metadata}


def _E(n, i, j):
    M = [[0] * n for _ in range(n)]
    M[i][j] = 1
    return M


def _sl_basis(n) -> list:
    out = [_E(n, i, j) for i in range(n) for j in range(n) if i != j]
    for i in range(n - 1):
        M = _E(n, i, i)
        M[i + 1][i + 1] = -1
        out.append(M)
    return out


def _mm(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _tr(A):
    return [list(r) for r in zip(*A)]


def _det_poly(n: int, var) -> HomoPoly:
    """Leibniz expansion; var(i, j) gives the variable index of entry (i, j)."""
    nv = max(var(i, j) for i in range(n) for j in range(n)) + 1
    mons: dict = {}
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        e = [0] * nv
        for i in range(n):
            e[var(i, perm[i])] += 1
        e = tuple(e)
        mons[e] = mons.get(e, 0) + (-1) ** inv
    return HomoPoly(nv, {k: v for k, v in mons.items() if v}, n)


def _linear_action(dim, images) -> list:
    """Matrix whose column k is images(k) (a coordinate vector)."""
    cols = [images(k) for k in range(dim)]
    return _tr(cols)


def _det9() -> CatalogEntry:
    var = lambda i, j: 3 * i + j
    poly = _det_poly(3, var)

    def to_mat(v):
        return [[v[var(i, j)] for j in range(3)] for i in range(3)]

    def flat(M):
        return [M[i][j] for i in range(3) for j in range(3)]

    action = []
    for A in _sl_basis(3):
        action.append(_linear_action(9, lambda k: flat(_mm(A, to_mat([1 if t == k else 0 for t in range(9)])))))
    for B in _sl_basis(3):
        action.append(_linear_action(9, lambda k: flat(_mm(to_mat([1 if t == k else 0 for t in range(9)]), _tr(B)))))
    ref = flat([[1 if i == j else 0 for j in range(3)] for i in range(3)])
    return CatalogEntry("det3_V9", 9, 3, poly, action, ref,
                        lambda v: float(np.linalg.det(np.array(v, float).reshape(3, 3))),
                        {"module": "R^3 (x) R^3", "group": "SL(3) x SL(3)", "isotropy": "SL(3)"})


_SYM_IDX = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def _det6() -> CatalogEntry:
    pos = {ij: k for k, ij in enumerate(_SYM_IDX)}
    var = lambda i, j: pos[(min(i, j), max(i, j))]
    poly = _det_poly(3, var)

    def to_mat(v):
        return [[v[var(i, j)] for j in range(3)] for i in range(3)]

    def flat(M):
        return [M[i][j] for i, j in _SYM_IDX]

    action = []
    for X in _sl_basis(3):
        def img(k, X=X):
            S = to_mat([1 if t == k else 0 for t in range(6)])
            XS = _mm(X, S)
            return flat([[XS[i][j] + XS[j][i] for j in range(3)] for i in range(3)])
        action.append(_linear_action(6, img))
    ref = [1, 0, 0, 1, 0, 1]
    return CatalogEntry("det3_Sym2", 6, 3, poly, action, ref,
                        lambda v: float(np.linalg.det(np.array(to_mat(v), float))),
                        {"module": "Sym^2 R^3", "group": "SL(3)", "isotropy": "SO(3)"})


_SKEW_IDX = [(i, j) for i in range(6) for j in range(i + 1, 6)]


def _skew_entry(v, i, j):
    pos = {ij: k for k, ij in enumerate(_SKEW_IDX)}
    if i == j:
        return 0
    if i < j:
        return v[pos[(i, j)]]
    return -v[pos[(j, i)]]


def _pfaffian_sum_poly() -> HomoPoly:
    """sum over S6 of sgn(s) a_s1s2 a_s3s4 a_s5s6, in the upper-triangle coordinates."""
    pos = {ij: k for k, ij in enumerate(_SKEW_IDX)}
    mons: dict = {}
    for perm in itertools.permutations(range(6)):
        inv = sum(1 for a in range(6) for b in range(a + 1, 6) if perm[a] > perm[b])
        s = (-1) ** inv
        e = [0] * 15
        for a in (0, 2, 4):
            i, j = perm[a], perm[a + 1]
            if i > j:
                i, j = j, i
                s = -s
            e[pos[(i, j)]] += 1
        e = tuple(e)
        mons[e] = mons.get(e, 0) + s
    return HomoPoly(15, {k: v for k, v in mons.items() if v}, 3)


def _matchings(items):
    if not items:
        yield [], 1
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1:]
        sgn = (-1) ** (k - 1)
        for m, s in _matchings(rest):
            yield [(first, items[k])] + m, sgn * s


def _pfaffian_matching_poly() -> HomoPoly:
    pos = {ij: k for k, ij in enumerate(_SKEW_IDX)}
    mons: dict = {}
    for m, s in _matchings(list(range(6))):
        e = [0] * 15
        for i, j in m:
            e[pos[(i, j)]] += 1
        mons[tuple(e)] = mons.get(tuple(e), 0) + s
    return HomoPoly(15, mons, 3)


def pfaffian_matching_value(A) -> Fraction:
    """Combinatorial Pfaffian of a skew 2m x 2m matrix by perfect matchings."""
    n = len(A)
    total = Fraction(0)
    for m, s in _matchings(list(range(n))):
        term = Fraction(s)
        for i, j in m:
            term *= Fraction(A[i][j])
        total += term
    return total


def _J(n):
    M = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        M[i][n + i] = 1
        M[n + i][i] = -1
    return M


def _pfaff15() -> CatalogEntry:
    poly = _pfaffian_sum_poly()

    def to_mat(v):
        return [[_skew_entry(v, i, j) for j in range(6)] for i in range(6)]

    def flat(M):
        return [M[i][j] for i, j in _SKEW_IDX]

    action = []
    for X in _sl_basis(6):
        def img(k, X=X):
            A = to_mat([1 if t == k else 0 for t in range(15)])
            XA = _mm(X, A)
            return flat([[XA[i][j] - XA[j][i] for j in range(6)] for i in range(6)])
        action.append(_linear_action(15, img))
    ref = flat(_J(3))
    return CatalogEntry("pfaffian_L2R6", 15, 3, poly, action, ref,
                        lambda v: 48.0 * float(pfaffian_matching_value(to_mat([Fraction(x) for x in v])))
                        if all(isinstance(x, (int, Fraction)) for x in v) else None,
                        {"module": "Lambda^2 R^6", "group": "SL(6)", "isotropy": "Sp(3,R)",
                         "normalization": "sum over S6 (48 x combinatorial Pfaffian)"})


def _quadric(k: int, l: int) -> CatalogEntry:
    n = k + l
    eta = [1] * k + [-1] * l
    mons = {}
    for i in range(n):
        e = [0] * n
        e[i] = 2
        mons[tuple(e)] = eta[i]
    poly = HomoPoly(n, mons, 2)
    action = []
    for i in range(n):
        for j in range(i + 1, n):
            M = [[0] * n for _ in range(n)]
            M[i][j] = eta[i]
            M[j][i] = -eta[j]
            action.append(M)
    ref = [1] + [0] * (n - 1)
    return CatalogEntry(f"q_{k}_{l}", n, 2, poly, action, ref,
                        lambda v: float(sum(e * float(x) ** 2 for e, x in zip(eta, v))),
                        {"module": f"R^({k},{l})", "group": f"SO({k},{l})"})


def _sym_basis(m):
    out = []
    for i in range(m):
        for j in range(i, m):
            S = [[0] * m for _ in range(m)]
            S[i][j] = 1
            S[j][i] = 1
            out.append(S)
    return out


def _pff_AtJA(n: int) -> CatalogEntry:
    """q(A) = Pff(A^T J A) = (A^T J A)_12 on 2n x 2 matrices, coordinates row-major."""
    rows = 2 * n
    dim = 2 * rows
    var = lambda r, c: 2 * r + c
    mons: dict = {}
    J = _J(n)
    for r in range(rows):
        for s in range(rows):
            if J[r][s]:
                e = [0] * dim
                e[var(r, 0)] += 1
                e[var(s, 1)] += 1
                mons[tuple(e)] = mons.get(tuple(e), 0) + J[r][s]
    poly = HomoPoly(dim, {k: v for k, v in mons.items() if v}, 2)

    def to_mat(v):
        return [[v[var(r, c)] for c in range(2)] for r in range(rows)]

    def flat(M):
        return [M[r][c] for r in range(rows) for c in range(2)]

    action = []
    for S in _sym_basis(rows):
        X = [[-x for x in row] for row in _mm(J, S)]
        action.append(_linear_action(dim, lambda k, X=X: flat(_mm(X, to_mat([1 if t == k else 0 for t in range(dim)])))))
    for Y in _sl_basis(2):
        action.append(_linear_action(dim, lambda k, Y=Y: flat(_mm(to_mat([1 if t == k else 0 for t in range(dim)]), _tr(Y)))))
    ref = [0] * dim
    ref[var(0, 0)] = 1
    ref[var(n, 1)] = 1

    def closed(v):
        A = np.array(v, float).reshape(rows, 2)
        return float((A.T @ np.array(J, float) @ A)[0, 1])

    return CatalogEntry(f"pff_AtJA_n{n}", dim, 2, poly, action, ref, closed,
                        {"module": f"R^{rows} (x) R^2", "group": f"Sp({n},R) x SL(2,R)"})


def _torus() -> CatalogEntry:
    poly = HomoPoly(3, {(1, 1, 1): 1}, 3)
    action = [[[1, 0, 0], [0, -1, 0], [0, 0, 0]], [[0, 0, 0], [0, 1, 0], [0, 0, -1]]]
    return CatalogEntry("torus_x1x2x3", 3, 3, poly, action, [1, 1, 1],
                        lambda v: float(v[0]) * float(v[1]) * float(v[2]),
                        {"module": "R^3", "group": "diagonal torus"})


_METADATA_ONLY = [
    ("herm3_octonions", 27, 3, {"group": "E6(-26)", "isotropy": "F4(-52)"}),
    ("herm3_split_cayley", 27, 3, {"group": "E6(6)", "isotropy": "F4(4)"}),
    ("spinor_spin7", 8, 2, {"group": "Spin(7)", "isotropy": "G2"}),
    ("spinor_spin9", 16, 2, {"group": "Spin(9)", "isotropy": "Spin(7)"}),
    ("im_octonions_g2", 7, 2, {"group": "G2", "isotropy": "SL(3)"}),
]

_CATALOG: list | None = None


def catalog() -> list[CatalogEntry]:
    global _CATALOG
    if _CATALOG is None:
        entries = [_det9(), _det6(), _pfaff15()]
        entries += [_quadric(k, l) for k, l in ((1, 2), (2, 1), (2, 2), (3, 1), (1, 3))]
        entries += [_pff_AtJA(2), _torus()]
        entries += [CatalogEntry(name, dim, deg, None, None, None, None, {**meta, "evaluator": "absent"})
                    for name, dim, deg, meta in _METADATA_ONLY]
        _CATALOG = entries
    return _CATALOG


def get_entry(name: str) -> CatalogEntry:
    for e in catalog():
        if e.name == name:
            return e
    raise KeyError(f"unknown catalog entry {name!r}")


def pfaffian_ratio() -> Fraction | None:
    """Ratio of the S6-sum polynomial to the matching Pfaffian, if constant."""
    S = _pfaffian_sum_poly()
    M = _pfaffian_matching_poly()
    if set(S.monomials) != set(M.monomials):
        return None
    ratios = {S.monomials[e] / M.monomials[e] for e in S.monomials}
    if len(ratios) != 1:
        return None
    r = ratios.pop()
    return r.rational_part() if r.is_rational() else None


# -- checks -------------------------------------------------------------------

def _apply(M, v):
    return [sum((as_exact(a) * as_exact(x) for a, x in zip(row, v) if a and x), ZERO) for row in M]


def _dh(h: HomoPoly, v, w):
    return sum((g.evaluate(v) * wi for g, wi in zip(h.gradient_polys, w) if wi), ZERO)


def infinitesimal_invariance(entry: CatalogEntry, samples) -> float:
    """max |dh_v(rho(X) v)| over the Lie algebra basis and sample points (character zero)."""
    entry.require()
    worst = 0.0
    for v in samples:
        for X in entry.action:
            worst = max(worst, abs(float(_dh(entry.poly, v, _apply(X, v)))))
    return worst


def euler_residual(entry: CatalogEntry, samples) -> float:
    """max |dh_v(v) - d h(v)|: the scaling generator acts with character d."""
    entry.require()
    worst = 0.0
    for v in samples:
        worst = max(worst, abs(float(_dh(entry.poly, v, v) - entry.poly.evaluate(v) * entry.degree)))
    return worst


def closed_form_deviation(entry: CatalogEntry, samples) -> float:
    entry.require()
    worst = 0.0
    for v in samples:
        ref = entry.closed_form(v) if entry.closed_form else None
        if ref is None:
            continue
        worst = max(worst, abs(float(entry.poly.evaluate(v)) - ref))
    return worst


def hessian_determinant(h: HomoPoly, v):
    rows = [[p.evaluate(v) for p in row] for row in h.hessian_polys]
    return det(rows)


def regularity_check(entry_or_poly, v=None, rtol: float = 1e-10) -> bool:
    """Full Hessian nondegenerate at v (exact when v is exact)."""
    if isinstance(entry_or_poly, CatalogEntry):
        entry_or_poly.require()
        h = entry_or_poly.poly
        v = entry_or_poly.reference if v is None else v
    else:
        h = entry_or_poly
    rows = [[p.evaluate(v) for p in row] for row in h.hessian_polys]
    if all(is_exact(x) for r in rows for x in r):
        return bool(det(rows))
    A = np.array(rows, dtype=float)
    scale = max(1.0, float(np.abs(A).max())) ** len(A)
    return abs(float(np.linalg.det(A))) > rtol * scale


def orbit_dimension(entry: CatalogEntry, v=None, with_scaling: bool = False) -> int:
    if entry.action is None:
        raise UnimplementedEntry(f"{entry.name} has no action data")
    v = entry.reference if v is None else v
    vecs = [_apply(X, v) for X in entry.action]
    if with_scaling:
        vecs.append([as_exact(x) for x in v])
    return rank(vecs)


def monomial_structure(h: HomoPoly, B: BlockStructure) -> str:
    """Case label for a cubic split into blocks: "1", "2", "3" or "violates"."""
    if h.d != 3:
        raise ValueError("monomial structure is classified for cubics")
    parts = multidegree_split(h, B)
    degs = set(parts)
    r = len(B.blocks)
    dims = [len(idx) for _, idx in B.blocks]
    for k in range(r):
        if all(deg[k] == 0 for deg in degs):
            return "violates"
    if r == 1 and degs == {(3,)}:
        return "1"
    if r == 2:
        for lin in (0, 1):
            want = (1, 2) if lin == 0 else (2, 1)
            if degs == {want} and dims[lin] == 1:
                return "2"
    if r == 3 and degs == {(1, 1, 1)} and dims == [1, 1, 1]:
        return "3"
    return "violates"
