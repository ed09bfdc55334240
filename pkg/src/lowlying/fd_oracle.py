"""Finite-difference cross-check for the negative spectrum.

Second-order central differences on ``[-L, L]`` with Dirichlet ends give a
symmetric tridiagonal matrix; its eigenvalues below any level are counted
with the LDL^T (Sturm) recurrence and isolated by bisection.  Nothing here
shares code with the transfer-matrix solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import PreconditionError
from .potential import Potential

__all__ = ["Tridiag", "build", "sturm_count", "lowest_eigenvalues", "default_half_width", "eigenvalues"]

MIN_NODES = 100
# stands in for an exactly zero pivot (r = -1) in the LDL^T recurrence
_BELOW_ONE = -1.0000000000000002


@dataclass(frozen=True)
class Tridiag:
    """Symmetric tridiagonal matrix with constant off-diagonal ``-1/h**2``."""

    n: int
    diag: np.ndarray
    offdiag: np.ndarray
    h: float
    L: float
    cell_q: np.ndarray = None

    def __post_init__(self):
        if self.cell_q is None:
            object.__setattr__(self, "cell_q", self.diag - 2.0 / (self.h * self.h))

    def nodes(self) -> np.ndarray:
        return -self.L + self.h * np.arange(1, self.n + 1)


def _cumulative(q: Potential):
    bp = np.asarray(q.breakpoints)
    F = np.concatenate([[0.0], np.cumsum(np.diff(bp) * np.asarray(q.values))])
    return bp, F


def build(q: Potential, L: float, n: int) -> Tridiag:
    """Discretize ``-d^2/dx^2 + q`` on ``[-L, L]`` with ``n`` interior nodes.

    Each diagonal entry uses the average of q over the cell
    ``[x_i - h/2, x_i + h/2]``, computed exactly from the cumulative integral.
    """
    a, b = q.support
    if not L > max(abs(a), abs(b)):
        raise PreconditionError("build", f"L={L} must exceed the support radius {max(abs(a), abs(b))}")
    if n < MIN_NODES:
        raise PreconditionError("build", f"n must be at least {MIN_NODES}, got {n}")
    h = 2.0 * L / (n + 1)
    x = -L + h * np.arange(1, n + 1)
    bp, F = _cumulative(q)
    # F is constant outside the support, so np.interp's clamping is exact
    avg = (np.interp(x + h / 2, bp, F) - np.interp(x - h / 2, bp, F)) / h
    diag = 2.0 / (h * h) + avg
    offdiag = np.full(n - 1, -1.0 / (h * h))
    return Tridiag(n, diag, offdiag, h, float(L), avg)


@numba.njit(cache=True)
def _count(cell_q, h, lam):
    # LDL^T pivots of T - lam written as d_i = (1 + r_i) / h^2; the ratio form
    # r_i = h^2 (q_i - lam) + r_{i-1} / (1 + r_{i-1}) never subtracts 2/h^2
    h2 = h * h
    count = 0
    r = 1.0 + h2 * (cell_q[0] - lam)
    for i in range(cell_q.shape[0]):
        if i > 0:
            r = h2 * (cell_q[i] - lam) + r / (1.0 + r)
        if r == -1.0:
            r = _BELOW_ONE
        if r < -1.0:
            count += 1
    return count


def sturm_count(T: Tridiag, lam: float) -> int:
    """Number of eigenvalues of T strictly below ``lam``."""
    return int(_count(T.cell_q, T.h, float(lam)))


def _gershgorin(T: Tridiag) -> tuple[float, float]:
    r = 2.0 * float(np.max(np.abs(T.offdiag))) if T.n > 1 else 0.0
    return float(np.min(T.diag)) - r, float(np.max(T.diag)) + r


def lowest_eigenvalues(T: Tridiag, m: int, tol: float = 1e-12) -> list[float]:
    """The ``m`` smallest eigenvalues, each bisected to width ``tol``."""
    if m < 1:
        raise PreconditionError("lowest_eigenvalues", f"m must be at least 1, got {m}")
    if m > T.n:
        raise PreconditionError("lowest_eigenvalues", f"m={m} exceeds the matrix size {T.n}")
    if not tol > 0:
        raise PreconditionError("lowest_eigenvalues", f"tol must be positive, got {tol}")
    lo0, hi0 = _gershgorin(T)
    out = []
    for k in range(m):
        lo = out[-1] if out else lo0
        hi = hi0
        # invariant: count(lo) <= k < count(hi)
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(T, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return out


def default_half_width(q: Potential, omega_est: float | None = None) -> float:
    """``max(30, R + 12/omega_est)`` with R the support radius."""
    a, b = q.support
    R = max(abs(a), abs(b))
    if omega_est is None or omega_est <= 0:
        return max(30.0, R + 1.0)
    return max(30.0, R + 12.0 / omega_est)


def eigenvalues(q: Potential, m: int, L: float | None = None, h: float = 2e-4,
                omega_est: float | None = None, richardson: bool = False,
                tol: float = 1e-13) -> list[float]:
    """Lowest ``m`` eigenvalues of the discretized operator at mesh step about ``h``.

    With ``richardson`` the results at steps h and h/2 are combined as
    ``(4 lam(h/2) - lam(h)) / 3`` to cancel the O(h^2) term.
    """
    if L is None:
        # whole multiple of h, so breakpoints on the h-grid fall on nodes at both steps
        L = math.ceil(default_half_width(q, omega_est) / h) * h
    n = int(round(2.0 * L / h)) - 1
    coarse = lowest_eigenvalues(build(q, L, n), m, tol)
    if not richardson:
        return coarse
    fine = lowest_eigenvalues(build(q, L, 2 * n + 1), m, tol)
    return [(4.0 * f - c) / 3.0 for c, f in zip(coarse, fine)]
