"""Small exact linear algebra over the scalar tower, plus the PseudoMetric type.

Matrices are lists of rows.  Entries may be ints, Fractions or QSqrt; nothing
here ever converts to floating point.  Float matrices go through numpy instead
(see :func:`signature`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .scalar import QSqrt, as_exact, is_exact, sign

ZERO = QSqrt()
ONE = QSqrt.rational(1)


def exact_matrix(rows) -> list[list[QSqrt]]:
    return [[as_exact(x) for x in row] for row in rows]


def is_exact_matrix(M) -> bool:
    if isinstance(M, np.ndarray) and M.dtype != object:
        return False
    return all(is_exact(x) for row in M for x in row)


def identity(n: int) -> list[list[QSqrt]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    Bt = transpose(B)
    return [[_dot(row, col) for col in Bt] for row in A]


def matvec(A, v):
    return [_dot(row, v) for row in A]


def _dot(u, v):
    acc = ZERO
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def bilinear(M, u, v):
    return _dot(u, matvec(M, v))


# -- sparse row reduction -----------------------------------------------------

def row_reduce(rows: Sequence[dict], ncols: int | None = None):
    """Gauss-Jordan on sparse rows (dict col -> value).

    Returns ``(pivots, reduced)`` where ``reduced`` are the nonzero reduced rows
    normalised to pivot value 1 and ``pivots`` their pivot columns.
    """
    basis: list[dict] = []
    pivots: list[int] = []
    for row in rows:
        r = {k: as_exact(v) for k, v in row.items() if v}
        for piv, b in zip(pivots, basis):
            c = r.get(piv)
            if c:
                for k, v in b.items():
                    nv = r.get(k, ZERO) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        if not r:
            continue
        piv = min(r)
        inv = r[piv].inverse()
        r = {k: v * inv for k, v in r.items()}
        # keep earlier basis rows reduced against the new pivot
        for i, b in enumerate(basis):
            c = b.get(piv)
            if c:
                for k, v in r.items():
                    nv = b.get(k, ZERO) - c * v
                    if nv:
                        b[k] = nv
                    else:
                        b.pop(k, None)
        basis.append(r)
        pivots.append(piv)
    return pivots, basis


def _dense_rows(M):
    return [{j: x for j, x in enumerate(row) if x} for row in M]


def rank(M) -> int:
    if not len(M):
        return 0
    pivots, _ = row_reduce(_dense_rows(M))
    return len(pivots)


def nullspace(M, ncols: int | None = None) -> list[list[QSqrt]]:
    """Basis of {x : M x = 0}; vectors ordered by free-column index."""
    if ncols is None:
        ncols = len(M[0])
    pivots, basis = row_reduce(_dense_rows(M))
    free = [j for j in range(ncols) if j not in pivots]
    out = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for piv, b in zip(pivots, basis):
            c = b.get(f)
            if c:
                v[piv] = -c
        out.append(v)
    return out


def solve(rows: Sequence[dict], rhs: Sequence, nvars: int):
    """Solve the sparse system rows . x = rhs exactly.

    Returns a particular solution (free variables set to zero) or ``None`` when
    the system is inconsistent.
    """
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[nvars] = b
        aug.append(r)
    pivots, basis = row_reduce(aug)
    if nvars in pivots:
        return None
    x = [ZERO] * nvars
    for piv, b in zip(pivots, basis):
        x[piv] = b.get(nvars, ZERO)
    return x


def inverse(M):
    n = len(M)
    aug = [{**{j: x for j, x in enumerate(row) if x}, n + i: ONE} for i, row in enumerate(M)]
    pivots, basis = row_reduce(aug)
    by_pivot = dict(zip(pivots, basis))
    if any(i not in by_pivot for i in range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [[by_pivot[i].get(n + j, ZERO) for j in range(n)] for i in range(n)]


def det(M):
    n = len(M)
    A = [list(map(as_exact, row)) for row in M]
    out = ONE
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return ZERO
        if p != c:
            A[c], A[p] = A[p], A[c]
            out = -out
        out = out * A[c][c]
        inv = A[c][c].inverse()
        for r in range(c + 1, n):
            f = A[r][c] * inv
            if f:
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return out


# -- signatures ---------------------------------------------------------------

def congruence_signature(M) -> tuple[int, int, int]:
    """(positive, negative, zero) counts by symmetric Gaussian elimination."""
    A = [list(map(as_exact, row)) for row in M]
    n = len(A)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if A[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and A[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j makes the (i, i) entry 2 A_ij != 0
            for k in range(n):
                A[i][k] = A[i][k] + A[j][k]
            for k in range(n):
                A[k][i] = A[k][i] + A[k][j]
            piv = i
        p = A[piv][piv]
        if sign(p) > 0:
            pos += 1
        else:
            neg += 1
        inv = p.inverse()
        for r in active:
            if r == piv or not A[r][piv]:
                continue
            f = A[r][piv] * inv
            for k in active:
                if A[piv][k]:
                    A[r][k] = A[r][k] - f * A[piv][k]
        for r in active:
            A[r][piv] = ZERO
            A[piv][r] = ZERO
        active.remove(piv)
    return pos, neg, n - pos - neg


def signature(M, rtol: float = 1e-8) -> tuple[int, int, int]:
    """Signature (k, l, z) of a symmetric matrix; exact for exact entries."""
    if len(M) == 0:
        return (0, 0, 0)
    if is_exact_matrix(M):
        return congruence_signature(M)
    A = np.asarray(M, dtype=float)
    w = np.linalg.eigvalsh((A + A.T) / 2)
    scale = np.max(np.abs(w)) if w.size else 0.0
    thr = rtol * scale
    k = int(np.sum(w > thr))
    l = int(np.sum(w < -thr))
    return k, l, len(w) - k - l


def to_numpy(M) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in M], dtype=float)


@dataclass
class PseudoMetric:
    """A symmetric bilinear form as a Gram matrix in a declared basis."""

    gram: list
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.gram)
        if not self.labels:
            self.labels = [f"v{i + 1}" for i in range(n)]
        if isinstance(self.gram, np.ndarray):
            self.gram = self.gram.tolist()

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def exact(self) -> bool:
        return is_exact_matrix(self.gram)

    @property
    def signature(self) -> tuple[int, int, int]:
        return signature(self.gram)

    @property
    def nondegenerate(self) -> bool:
        return self.signature[2] == 0

    def is_symmetric(self) -> bool:
        n = self.dim
        if self.exact:
            return all(self.gram[i][j] == self.gram[j][i] for i in range(n) for j in range(n))
        A = self.as_array()
        return bool(np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())))

    def as_array(self) -> np.ndarray:
        return to_numpy(self.gram)

    def __call__(self, u, v):
        if self.exact and all(is_exact(x) for x in list(u) + list(v)):
            return bilinear(self.gram, u, v)
        return float(np.asarray(u, float) @ self.as_array() @ np.asarray(v, float))

    def to_json(self) -> dict:
        return {
            "labels": self.labels,
            "gram": [[str(x) if self.exact else float(x) for x in row] for row in self.gram],
            "signature": list(self.signature),
        }


def max_abs_diff(A, B) -> float:
    a = to_numpy(A) if not isinstance(A, np.ndarray) else A
    b = to_numpy(B) if not isinstance(B, np.ndarray) else B
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def frac(p, q=1) -> Fraction:
    return Fraction(p, q)
