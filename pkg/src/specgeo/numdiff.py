"""Central finite differences evaluated in extended precision.

Function values are computed with mpmath at ``DPS`` digits so that the
cancellation in a second difference with step 1e-5 costs nothing; the only
error left is the O(step^2) truncation term.
"""
from __future__ import annotations

from typing import Callable, Sequence

import mpmath
import numpy as np

DPS = 30
STEP = 1e-5


def real_hessian(f: Callable, x: Sequence, step: float = STEP) -> np.ndarray:
    """Hessian of a real function of m real variables by central differences.

    ``f`` receives a list of mpmath numbers and must return an mpmath real.
    """
    m = len(x)
    with mpmath.workdps(DPS):
        x = [mpmath.mpf(v) for v in x]
        s = mpmath.mpf(step)

        def at(shifts):
            p = list(x)
            for i, c in shifts:
                p[i] += c * s
            return f(p)

        f0 = f(x)
        out = np.zeros((m, m))
        for i in range(m):
            val = (at([(i, 1)]) - 2 * f0 + at([(i, -1)])) / s ** 2
            out[i, i] = float(val)
            for j in range(i + 1, m):
                val = (at([(i, 1), (j, 1)]) - at([(i, 1), (j, -1)])
                       - at([(i, -1), (j, 1)]) + at([(i, -1), (j, -1)])) / (4 * s ** 2)
                out[i, j] = out[j, i] = float(val)
    return out


def wirtinger_hessian(f: Callable, X: Sequence, Y: Sequence, step: float = STEP) -> np.ndarray:
    """d^2 f / dz_j d(conj z_k) for a real function of z = X + iY.

    ``f(xs, ys)`` receives mpmath lists.  Assembled from the real Hessian as
    1/4 [(f_xx + f_yy) + i (f_xy - f_yx)].
    """
    n = len(X)
    R = real_hessian(lambda p: f(p[:n], p[n:]), list(X) + list(Y), step)
    xx, xy = R[:n, :n], R[:n, n:]
    yx, yy = R[n:, :n], R[n:, n:]
    return 0.25 * ((xx + yy) + 1j * (xy - yx))


def realify(Hh: np.ndarray) -> np.ndarray:
    """Real 2n x 2n form Re(w^T Hh conj(w')) in coordinates (Re w, Im w)."""
    A, B = Hh.real, Hh.imag
    return np.block([[A, B], [-B, A]])


def complex_hessian_holomorphic(f: Callable, Z: Sequence[complex], step: float = STEP) -> np.ndarray:
    """d^2 f / dz_j dz_k of a holomorphic function by complex central differences."""
    n = len(Z)
    with mpmath.workdps(DPS):
        z = [mpmath.mpc(c) for c in Z]
        s = mpmath.mpf(step)

        def at(shifts):
            p = list(z)
            for i, c in shifts:
                p[i] += c * s
            return f(p)

        f0 = f(z)
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            out[i, i] = complex((at([(i, 1)]) - 2 * f0 + at([(i, -1)])) / s ** 2)
            for j in range(i + 1, n):
                v = (at([(i, 1), (j, 1)]) - at([(i, 1), (j, -1)])
                     - at([(i, -1), (j, 1)]) + at([(i, -1), (j, -1)])) / (4 * s ** 2)
                out[i, j] = out[j, i] = complex(v)
    return out
