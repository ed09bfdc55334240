"""Exact transfer matrices for ``u'' = (q(x) - lam) u`` with piecewise-constant q.

On a piece where ``s = q - lam`` is constant the fundamental matrix is

    [[C(L),     L S(L)],
     [s L S(L), C(L)  ]],   C = cosh(sqrt(s) L),  S = sinh(sqrt(s) L) / (sqrt(s) L),

which covers the oscillatory (s < 0), linear (s = 0) and exponential (s > 0)
cases with one formula.  Matrices and states carry a separate ``logscale`` so
that growth like ``exp(700)`` never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .potential import Potential

__all__ = [
    "ScaledMatrix",
    "State",
    "Jump",
    "piece_propagator",
    "propagate",
    "propagate_nodes",
    "segments",
]

# |s| L^2 below this switches to the Taylor forms of C and S
TAYLOR_THRESHOLD = 1e-8
# a zero of u closer than this (in x) to a piece end is attributed to that end
ZERO_LOCATION_TOL = 1e-12


def _entries(s: float, L: float) -> tuple[float, float, float, float]:
    """Return ``(C, L*S, s*L*S, logscale)`` with the first three scaled by exp(-logscale)."""
    z = s * L * L
    if abs(z) < TAYLOR_THRESHOLD:
        c = 1.0 + z / 2.0 + z * z / 24.0
        ls = L * (1.0 + z / 6.0 + z * z / 120.0)
        return c, ls, s * ls, 0.0
    if s > 0:
        mu = math.sqrt(s)
        x = mu * L
        if x < 1.0:
            return math.cosh(x), math.sinh(x) / mu, mu * math.sinh(x), 0.0
        e = math.exp(-2.0 * x)
        half_sinh = -math.expm1(-2.0 * x) / 2.0
        return (1.0 + e) / 2.0, half_sinh / mu, mu * half_sinh, x
    k = math.sqrt(-s)
    x = k * L
    return math.cos(x), math.sin(x) / k, -k * math.sin(x), 0.0


@dataclass(frozen=True)
class ScaledMatrix:
    """2x2 propagator stored as ``exp(logscale) * m``."""

    m: np.ndarray
    logscale: float = 0.0

    @classmethod
    def normalized(cls, m: np.ndarray, logscale: float = 0.0) -> "ScaledMatrix":
        big = float(np.max(np.abs(m)))
        return cls(m / big, logscale + math.log(big))

    @classmethod
    def identity(cls) -> "ScaledMatrix":
        return cls(np.eye(2), 0.0)

    def matrix(self) -> np.ndarray:
        return math.exp(self.logscale) * self.m

    def log_abs_det(self) -> float:
        """``log|det|`` of the true matrix; zero for every exact propagator.

        Only meaningful while ``exp(2 * logscale) * eps`` is small: for stiff
        propagators ``det(m)`` cancels below rounding and this returns -inf.
        """
        d = self.m[0, 0] * self.m[1, 1] - self.m[0, 1] * self.m[1, 0]
        if d == 0.0:
            return -math.inf
        return math.log(abs(d)) + 2.0 * self.logscale

    def det(self) -> float:
        d = self.m[0, 0] * self.m[1, 1] - self.m[0, 1] * self.m[1, 0]
        return math.copysign(math.exp(self.log_abs_det()), d)

    def __matmul__(self, other: "ScaledMatrix") -> "ScaledMatrix":
        return ScaledMatrix.normalized(self.m @ other.m, self.logscale + other.logscale)

    def inverse(self) -> "ScaledMatrix":
        # unit determinant: the inverse of exp(ls) m is exp(ls) adj(m)
        (a, b), (c, d) = self.m
        return ScaledMatrix(np.array([[d, -b], [-c, a]]), self.logscale)

    def apply(self, state: "State") -> "State":
        u, du = self.m @ np.array([state.u, state.du])
        return State.make(u, du, state.logscale + self.logscale)


@dataclass(frozen=True)
class State:
    """Solution data ``exp(logscale) * (u, du)`` at one point."""

    u: float
    du: float
    logscale: float = 0.0

    @classmethod
    def make(cls, u: float, du: float, logscale: float = 0.0) -> "State":
        n = math.hypot(u, du)
        if n == 0.0 or not math.isfinite(n):
            raise PreconditionError("propagate", "state (u, du) must be finite and non-zero")
        return cls(u / n, du / n, logscale + math.log(n))

    def values(self) -> tuple[float, float]:
        f = math.exp(self.logscale)
        return f * self.u, f * self.du


@dataclass(frozen=True)
class Jump:
    """Interface condition ``(u, du)(x+0) = matrix @ (u, du)(x-0)`` at ``position``."""

    matrix: tuple[tuple[float, float], tuple[float, float]]
    position: float = 0.0


def piece_propagator(q_minus_lambda: float, length: float) -> ScaledMatrix:
    """Closed-form propagator across one constant piece, normalized to max entry 1."""
    if length < 0:
        raise PreconditionError("piece_propagator", f"length must be non-negative, got {length}")
    c, b, a, ls = _entries(q_minus_lambda, length)
    return ScaledMatrix.normalized(np.array([[c, b], [a, c]]), ls)


def segments(P: Potential, start: float, stop: float, cuts: Sequence[float] = ()) -> list[tuple[float, float, float]]:
    """Split ``[start, stop]`` into ``(left, right, value)`` pieces of constant P.

    P is zero outside its support, so pieces outside it carry value 0.
    """
    pts = {start, stop}
    pts.update(x for x in P.breakpoints if start < x < stop)
    pts.update(x for x in cuts if start < x < stop)
    pts = sorted(pts)
    out = []
    for a, b in zip(pts, pts[1:]):
        out.append((a, b, float(P(0.5 * (a + b)))))
    return out


def _is_zero(u: float, du: float) -> bool:
    return abs(u) <= ZERO_LOCATION_TOL * abs(du)


def _piece_nodes(s: float, L: float, start: State, end: State) -> int:
    """Zeros of u in ``(0, L]`` for one piece with constant ``s = q - lam``."""
    start_zero = _is_zero(start.u, start.du)
    end_zero = _is_zero(end.u, end.du)
    if s < 0:
        k = math.sqrt(-s)
        if k * L >= math.pi:
            # u = R sin(theta) with theta advancing by exactly k L
            t0 = math.atan2(k * start.u, start.du) / math.pi
            if start_zero:
                t0 = float(round(t0))
            te = t0 + k * L / math.pi
            if end_zero:
                te = float(round(te))
            return math.floor(te) - math.floor(t0)
    # at most one zero here; it is simple, so it shows up as a sign change
    if start_zero:
        return 0
    if end_zero or (start.u > 0) != (end.u > 0):
        return 1
    return 0


def _walk(P: Potential, lam: float, start: float, stop: float, init: State,
          jump: Optional[Jump] = None, record: Optional[list] = None) -> tuple[State, int]:
    cuts = [jump.position] if jump is not None else []
    state = init
    nodes = 0
    jumped = False
    for a, b, v in segments(P, start, stop, cuts):
        if jump is not None and not jumped and a >= jump.position:
            state = _apply_jump(jump, state)
            jumped = True
        s = v - lam
        L = b - a
        if record is not None:
            record.append((a, b, s, state))
        c, bb, aa, ls = _entries(s, L)
        new = State.make(c * state.u + bb * state.du, aa * state.u + c * state.du, state.logscale + ls)
        nodes += _piece_nodes(s, L, state, new)
        state = new
    if jump is not None and not jumped and stop >= jump.position:
        state = _apply_jump(jump, state)
    return state, nodes


def _apply_jump(jump: Jump, state: State) -> State:
    (a, b), (c, d) = jump.matrix
    return State.make(a * state.u + b * state.du, c * state.u + d * state.du, state.logscale)


def propagate(P: Potential, lam: float, start: float, stop: float, init: State,
              jump: Optional[Jump] = None) -> State:
    """Carry ``init`` at ``start`` to ``stop`` across all pieces (zero gaps included)."""
    if start > stop:
        raise PreconditionError("propagate", f"need start <= stop, got {start} > {stop}")
    if start == stop:
        return init
    return _walk(P, lam, start, stop, init, jump)[0]


def propagate_nodes(P: Potential, lam: float, init: State, start: Optional[float] = None,
                    stop: Optional[float] = None, jump: Optional[Jump] = None) -> tuple[State, int]:
    """Propagate across the support of P and count zeros of u on ``(start, stop]``.

    A sign flip imposed by an interface matrix is not a zero and is not counted.
    """
    if init.u == 0.0 and init.du == 0.0:
        raise PreconditionError("propagate_nodes", "initial state must be non-zero")
    a, b = P.support
    start = a if start is None else start
    stop = b if stop is None else stop
    if start > stop:
        raise PreconditionError("propagate_nodes", f"need start <= stop, got {start} > {stop}")
    return _walk(P, lam, start, stop, init, jump)
