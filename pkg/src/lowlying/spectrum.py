"""Negative spectrum, Regge eigenvalues and zero-energy resonances on the line.

For ``-d^2/dx^2 + q`` with q supported in ``[a, b]`` a bound state with
eigenvalue ``-omega**2`` is ``exp(omega x)`` left of ``a`` and
``exp(-omega x)`` right of ``b``.  Shooting ``(1, omega)`` from ``a`` and
measuring ``u'(b) + omega u(b)`` therefore locates eigenvalues, while the
node count of the same solution counts eigenvalues below ``-omega**2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, PreconditionError
from .potential import Potential
from .propagator import Jump, State, _walk
from .solution import PiecewiseSolution

__all__ = [
    "SpectralResult",
    "HalfBoundState",
    "Problem",
    "mismatch",
    "count_negative",
    "count_below",
    "negative_eigenvalues",
    "regge_eigenvalues",
    "half_bound_state",
    "theta_eta",
    "resonance_set",
    "eigenfunction",
    "RESONANCE_TOL",
    "OMEGA_FLOOR",
]

log = logging.getLogger(__name__)

# |mismatch(q, 0)| below this declares q resonant
RESONANCE_TOL = 1e-9
# decay rates below this are not resolved as eigenvalues
OMEGA_FLOOR = 1e-8
MAX_ITER = 200


@dataclass(frozen=True)
class Problem:
    """A line operator ``-d^2/dx^2 + q`` with an optional interface jump.

    ``start``/``stop`` bound the region where the solution is not a pure
    exponential; they default to the support of q (extended to contain the
    interface).
    """

    q: Potential
    jump: Optional[Jump] = None
    start: float = field(default=None)
    stop: float = field(default=None)

    def __post_init__(self):
        a, b = self.q.support
        if self.jump is not None:
            a, b = min(a, self.jump.position - 1.0), max(b, self.jump.position + 1.0)
        if self.start is None:
            object.__setattr__(self, "start", a)
        if self.stop is None:
            object.__setattr__(self, "stop", b)

    def shoot(self, omega: float) -> tuple[State, int]:
        """Left-decaying solution at energy ``-omega**2``; returns end state and interior nodes."""
        return _walk(self.q, -omega * omega, self.start, self.stop, State.make(1.0, omega), self.jump)

    def mismatch(self, omega: float) -> float:
        st, _ = self.shoot(omega)
        # State is normalized, so this is (u' + omega u) / |(u, u')|
        return st.du + omega * st.u

    def count_below(self, omega: float, resonance_tol: float = 0.0) -> int:
        """Number of eigenvalues strictly below ``-omega**2``."""
        st, nodes = self.shoot(omega)
        d = st.du + omega * st.u
        # a zero of A exp(omega t) + B exp(-omega t) on the right tail exists iff u(b) D < 0
        if st.u * d < 0 and abs(d) > resonance_tol:
            nodes += 1
        return nodes

    def omega_bound(self) -> float:
        """An omega above every eigenvalue's decay rate (0 if none can exist)."""
        qmin = min(self.q.min(), 0.0)
        if self.jump is None:
            return math.sqrt(-qmin) * (1.0 + 1e-12)
        hi = max(math.sqrt(-qmin), 1.0)
        for _ in range(MAX_ITER):
            if self.count_below(hi) == 0:
                return hi
            hi *= 2.0
        raise ConvergenceError("omega_bound: eigenvalue count does not vanish for large omega")

    def reflected(self) -> "Problem":
        """The mirror problem ``x -> -x``; states map as ``(u, u') -> (u, -u')``."""
        q = Potential(tuple(-x for x in reversed(self.q.breakpoints)), tuple(reversed(self.q.values)))
        jump = None
        if self.jump is not None:
            (a, b), (c, d) = self.jump.matrix
            # P J^-1 P with P = diag(1, -1) and det J = 1
            jump = Jump(((d, b), (c, a)), -self.jump.position)
        return Problem(q, jump, -self.stop, -self.start)

    def matching_residual(self, omega: float) -> float:
        """Smallest ``|sin|`` of the angle between the left- and right-decaying solutions.

        Both are compared at every grid point (interfaces excluded).  Unlike
        the one-sided mismatch this does not amplify rounding by the growth
        of the solution across barriers.
        """
        lam = -omega * omega
        left: list = []
        end, _ = _walk(self.q, lam, self.start, self.stop, State.make(1.0, omega), self.jump, left)
        mirror = self.reflected()
        right: list = []
        mend, _ = _walk(mirror.q, lam, mirror.start, mirror.stop, State.make(1.0, omega), mirror.jump, right)
        skip = self.jump.position if self.jump is not None else None
        lstates = {a: st for a, _, _, st in left}
        lstates[self.stop] = end
        rstates = {-a: st for a, _, _, st in right}
        rstates[self.start] = mend
        best = math.inf
        for x, sl in lstates.items():
            sr = rstates.get(x)
            if sr is None or x == skip:
                continue
            best = min(best, abs(sl.u * -sr.du - sl.du * sr.u))
        return best

    def solution(self, omega: float, init: Optional[State] = None) -> PiecewiseSolution:
        init = State.make(1.0, omega) if init is None else init
        record: list = []
        end, _ = _walk(self.q, -omega * omega, self.start, self.stop, init, self.jump, record)
        pos = self.jump.position if self.jump is not None else None
        return PiecewiseSolution(record, end, omega, interface=pos)


@dataclass(frozen=True)
class SpectralResult:
    """One negative eigenvalue ``-omega**2``.

    ``mismatch_residual`` is the sine of the angle between the left- and
    right-decaying solutions at the located omega (0 for an exact eigenvalue).
    """

    omega: float
    node_index: int
    mismatch_residual: float
    eigenfunction: PiecewiseSolution = field(repr=False, compare=False)

    @property
    def eigenvalue(self) -> float:
        return -self.omega * self.omega


@dataclass(frozen=True)
class HalfBoundState:
    """Bounded zero-energy solution; constant ``v_minus`` / ``v_plus`` off the support."""

    v_minus: float
    v_plus: float
    solution: PiecewiseSolution = field(repr=False, compare=False)

    @property
    def theta(self) -> float:
        return self.v_plus / self.v_minus

    def scaled(self, c: float) -> "HalfBoundState":
        sol = self.solution.rescaled(math.log(abs(c)))
        if c < 0:
            raise PreconditionError("HalfBoundState.scaled", "use a positive factor")
        return HalfBoundState(c * self.v_minus, c * self.v_plus, sol)


def mismatch(q: Potential, omega: float) -> float:
    """Normalized Jost-type mismatch ``(u'(b) + omega u(b)) / |(u(b), u'(b))|``."""
    if omega < 0:
        raise PreconditionError("mismatch", f"omega must be non-negative, got {omega}")
    return Problem(q).mismatch(omega)


def count_negative(q: Potential, resonance_tol: float = RESONANCE_TOL) -> int:
    """Number of negative eigenvalues, from the nodes of the zero-energy solution."""
    return Problem(q).count_below(0.0, resonance_tol)


def count_below(q: Potential, omega: float) -> int:
    return Problem(q).count_below(omega)


def eigenfunction(problem: Problem, omega: float) -> PiecewiseSolution:
    """Normalized eigenfunction for a located decay rate (positive on the left tail)."""
    return problem.solution(omega).normalized()


def _isolate(problem: Problem, lo: float, hi: float, n_lo: int, tol: float) -> list[tuple[float, float]]:
    """Brackets ``(w1, w2)`` each containing exactly one eigenvalue decay rate.

    ``count_below`` is non-increasing in omega; bisection on this integer
    function isolates every jump.
    """
    known = {lo: n_lo, hi: problem.count_below(hi)}
    brackets = []
    for k in range(n_lo - known[hi]):
        target = known[hi] + k  # bracket for the eigenvalue with count_below jumping target -> target+1
        a = max(w for w, n in known.items() if n >= target + 1)
        b = min(w for w, n in known.items() if n <= target)
        for _ in range(MAX_ITER):
            if known[a] == target + 1 and known[b] == target:
                break
            if b - a <= tol * 1e-3:
                raise ConvergenceError("negative_eigenvalues: could not separate eigenvalues")
            m = 0.5 * (a + b)
            known[m] = problem.count_below(m)
            if known[m] >= target + 1:
                a = m
            else:
                b = m
        else:
            raise ConvergenceError("negative_eigenvalues: bracketing did not converge in 200 steps")
        brackets.append((a, b))
    return brackets


def _refine(problem: Problem, a: float, b: float, tol: float, op: str) -> float:
    fa, fb = problem.mismatch(a), problem.mismatch(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ConvergenceError(f"{op}: mismatch does not change sign on [{a}, {b}]")
    try:
        return brentq(problem.mismatch, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)
    except RuntimeError as exc:
        raise ConvergenceError(f"{op}: root refinement failed: {exc}") from exc


def solve_problem(problem: Problem, tol: float = 1e-13, op: str = "negative_eigenvalues") -> list[SpectralResult]:
    if not tol > 0:
        raise PreconditionError(op, f"tol must be positive, got {tol}")
    hi = problem.omega_bound()
    if hi <= OMEGA_FLOOR:
        return []
    n = problem.count_below(OMEGA_FLOOR)
    if n == 0:
        return []
    total = problem.count_below(0.0, RESONANCE_TOL)
    if total > n:
        log.warning("%s: %d eigenvalue(s) with decay rate below %g not resolved", op, total - n, OMEGA_FLOOR)
    results = []
    # brackets come out ground state first (largest omega last in the count ordering)
    for a, b in _isolate(problem, OMEGA_FLOOR, hi, n, tol):
        w = _refine(problem, a, b, tol, op)
        _, nodes = problem.shoot(w)
        results.append(SpectralResult(w, nodes, problem.matching_residual(w), eigenfunction(problem, w)))
    results.sort(key=lambda r: -r.omega)
    return results


def negative_eigenvalues(q: Potential, tol: float = 1e-13) -> list[SpectralResult]:
    """All resolvable negative eigenvalues, ordered ground state first."""
    return solve_problem(Problem(q), tol)


def regge_eigenvalues(V: Potential, tol: float = 1e-13, grid: int = 2000) -> list[float]:
    """Positive eigenvalues of the Regge problem on [-1, 1].

    ``-u'' + (V + omega**2) u = 0`` with ``u'(-1) = omega u(-1)`` and
    ``u'(1) = -omega u(1)``.  Roots are isolated by a sign scan of the
    boundary residual (not by node counts), then refined.  Returned in
    decreasing order.
    """
    a, b = V.support
    if a < -1.0 or b > 1.0:
        raise PreconditionError("regge_eigenvalues", f"support of V must lie in [-1, 1], got [{a}, {b}]")
    problem = Problem(V, start=-1.0, stop=1.0)
    qmin = min(V.min(), 0.0)
    if qmin >= 0.0:
        return []
    hi = math.sqrt(-qmin) * (1.0 + 1e-12)
    ws = np.union1d(np.geomspace(OMEGA_FLOOR, hi, grid // 4), np.linspace(OMEGA_FLOOR, hi, grid))
    ds = np.array([problem.mismatch(w) for w in ws])
    roots = []
    for i in np.nonzero(np.sign(ds[:-1]) * np.sign(ds[1:]) <= 0)[0]:
        if ds[i] == 0.0 and i > 0 and roots and roots[-1] == ws[i]:
            continue
        roots.append(_refine(problem, ws[i], ws[i + 1], tol, "regge_eigenvalues"))
    return sorted(set(roots), reverse=True)


def half_bound_state(q: Potential, tol: float = RESONANCE_TOL) -> Optional[HalfBoundState]:
    """Half-bound state ``v`` with ``v = 1`` left of the support, or None if q is not resonant."""
    if not tol > 0:
        raise PreconditionError("half_bound_state", f"tol must be positive, got {tol}")
    problem = Problem(q)
    if abs(problem.mismatch(0.0)) > tol:
        return None
    sol = problem.solution(0.0, State.make(1.0, 0.0))
    v_minus, v_plus = sol.tail_amplitudes
    return HalfBoundState(v_minus, v_plus, sol)


def theta_eta_of(hb: HalfBoundState, U: Potential) -> tuple[float, float]:
    eta = hb.solution.weighted_integral(U) / (hb.v_minus * hb.v_plus)
    return hb.theta, eta


def theta_eta(V: Potential, U: Potential) -> tuple[float, float]:
    """Interface parameters ``theta = v+/v-`` and ``eta = (1/(v- v+)) * integral U v**2``."""
    hb = half_bound_state(V)
    if hb is None:
        raise PreconditionError("theta_eta", "V is not resonant (|mismatch(V, 0)| > 1e-9)")
    return theta_eta_of(hb, U)


def resonance_set(V: Potential, lo: float, hi: float, tol: float = 1e-11) -> list[float]:
    """Couplings ``alpha`` in ``(lo, hi)`` for which ``alpha V`` is resonant.

    Each resonance crossed away from zero coupling changes the eigenvalue
    count of ``alpha V`` by exactly one, and the count is monotone on each
    side of zero, so bisection on count jumps finds every point.  ``alpha = 0``
    is always resonant and is reported when it lies inside the interval.
    """
    if not lo < hi:
        raise PreconditionError("resonance_set", f"need lo < hi, got {lo} >= {hi}")
    if V.is_zero():
        raise PreconditionError("resonance_set", "V must not vanish identically")

    def count(alpha: float) -> int:
        return Problem(alpha * V).count_below(0.0)

    found: list[float] = []

    def search(x1: float, c1: int, x2: float, c2: int):
        if c1 == c2:
            return
        if x2 - x1 <= tol:
            found.append(0.5 * (x1 + x2))
            return
        m = 0.5 * (x1 + x2)
        cm = count(m)
        search(x1, c1, m, cm)
        search(m, cm, x2, c2)

    sides = []
    if hi > 0:
        sides.append((max(lo, 0.0) + tol, hi - tol))
    if lo < 0:
        sides.append((lo + tol, min(hi, 0.0) - tol))
    for x1, x2 in sides:
        if x1 < x2:
            search(x1, count(x1), x2, count(x2))
    if lo < 0.0 < hi:
        found.append(0.0)
    return sorted(found)
