"""Closed-form representation of a solution of ``-v'' + q v = lam v`` on the line.

Inside the shooting interval the solution is stored piece by piece (start
state plus the constant ``s = q - lam``); outside it follows exact exponential
(or constant) tails.  All integrals of ``v**2`` against piecewise-constant
weights are evaluated in closed form.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .potential import Potential
from .propagator import State, _entries

__all__ = ["PiecewiseSolution", "square_integral"]

_SERIES_TERMS = 14


@lru_cache(maxsize=1)
def _series_coefficients() -> tuple[float, ...]:
    # S(x) = sum s^n x^(2n+1)/(2n+1)!,  S(x)^2 = sum c_n s^n x^(2n+2)
    f = [1.0 / math.factorial(2 * n + 1) for n in range(_SERIES_TERMS)]
    return tuple(sum(f[i] * f[n - i] for i in range(n + 1)) for n in range(_SERIES_TERMS))


def _integral_S2(s: float, L: float, C: float, LS: float) -> float:
    """Integral over [0, L] of ``(sinh(sqrt(s) x) / sqrt(s))**2``."""
    z = s * L * L
    if abs(z) > 0.1:
        return (C * LS - L) / (2.0 * s)
    c = _series_coefficients()
    return sum(c[n] * z ** n * L ** 3 / (2 * n + 3) for n in range(_SERIES_TERMS))


def square_integral(s: float, L: float, u0: float, p0: float) -> float:
    """Integral over ``[0, L]`` of ``u**2`` where ``u'' = s u``, ``u(0) = u0``, ``u'(0) = p0``."""
    if L <= 0.0:
        return 0.0
    if s > 0.0 and math.sqrt(s) * L > 1.0:
        mu = math.sqrt(s)
        x = mu * L
        if x > 300.0:
            # keep exp(2x) finite: integrate the halves separately
            c, b, a, _ = _entries(s, L / 2)
            left = square_integral(s, L / 2, u0, p0)
            um, pm = c * u0 + b * p0, a * u0 + c * p0
            return left + math.exp(x) * square_integral(s, L / 2, um, pm)
        A = 0.5 * (u0 + p0 / mu)
        B = 0.5 * (u0 - p0 / mu)
        return (A * A * math.expm1(2 * x) - B * B * math.expm1(-2 * x)) / (2 * mu) + 2 * A * B * L
    C, LS, _, _ = _entries(s, L)
    return u0 * u0 * (L + C * LS) / 2.0 + u0 * p0 * LS * LS + p0 * p0 * _integral_S2(s, L, C, LS)


@dataclass(frozen=True)
class _Piece:
    left: float
    right: float
    s: float
    state: State


class PiecewiseSolution:
    """Exact solution on the line built from a shooting trace.

    Args:
        pieces: ``(left, right, s, state_at_left)`` tuples covering
            ``[start, stop]`` in order.  At an interface two pieces share an
            endpoint and carry independent start states.
        end_state: state at ``stop`` (right limit).
        omega: tail decay rate; 0 gives constant tails.
        log_scale: the stored solution is divided by ``exp(log_scale)``.
        interface: position of an interface jump, if any.
    """

    def __init__(self, pieces, end_state: State, omega: float, log_scale: float = 0.0,
                 interface: Optional[float] = None):
        self._pieces = [_Piece(*p) for p in pieces]
        self._lefts = [p.left for p in self._pieces]
        self.end_state = end_state
        self.omega = float(omega)
        self.log_scale = float(log_scale)
        self.interface = interface
        self.start = self._pieces[0].left
        self.stop = self._pieces[-1].right

    def rescaled(self, log_factor: float) -> "PiecewiseSolution":
        """Same solution multiplied by ``exp(log_factor)``."""
        pieces = [(p.left, p.right, p.s, p.state) for p in self._pieces]
        return PiecewiseSolution(pieces, self.end_state, self.omega, self.log_scale - log_factor,
                                 self.interface)

    def normalized(self) -> "PiecewiseSolution":
        return self.rescaled(-0.5 * math.log(self.integral_sq()))

    @property
    def breakpoints(self) -> list[float]:
        return self._lefts + [self.stop]

    def _true(self, u: float, du: float, ls: float) -> tuple[float, float]:
        f = math.exp(ls - self.log_scale)
        return f * u, f * du

    def _piece_state(self, piece: _Piece, x: float) -> tuple[float, float, float]:
        """Scaled ``(u, du, logscale)`` at ``x`` inside ``piece``."""
        st = piece.state
        d = x - piece.left
        if d == 0.0:
            return st.u, st.du, st.logscale
        c, b, a, ls = _entries(piece.s, d)
        nst = State.make(c * st.u + b * st.du, a * st.u + c * st.du, st.logscale + ls)
        return nst.u, nst.du, nst.logscale

    def left_tail(self) -> tuple[float, float]:
        """Amplitude and derivative at ``start`` (the left tail is ``a exp(omega (x - start))``)."""
        st = self._pieces[0].state
        return self._true(st.u, st.du, st.logscale)

    def right_tail(self) -> tuple[float, float]:
        st = self.end_state
        return self._true(st.u, st.du, st.logscale)

    @property
    def tail_amplitudes(self) -> tuple[float, float]:
        return self.left_tail()[0], self.right_tail()[0]

    def state_at(self, x: float, side: str = "right") -> tuple[float, float]:
        """``(v(x), v'(x))``; ``side`` picks the one-sided limit at breakpoints."""
        if x < self.start or (x == self.start and side == "left"):
            a, _ = self.left_tail()
            e = math.exp(self.omega * (x - self.start))
            return a * e, self.omega * a * e
        if x > self.stop or (x == self.stop and side == "right"):
            a, _ = self.right_tail()
            e = math.exp(-self.omega * (x - self.stop))
            return a * e, -self.omega * a * e
        if side == "left":
            i = bisect.bisect_left(self._lefts, x) - 1
        else:
            i = bisect.bisect_right(self._lefts, x) - 1
        i = min(max(i, 0), len(self._pieces) - 1)
        return self._true(*self._piece_state(self._pieces[i], x))

    def __call__(self, x: float) -> float:
        return self.state_at(x)[0]

    def derivative(self, x: float) -> float:
        return self.state_at(x)[1]

    def _tail_integral(self, amp: float, d1: float, d2: float) -> float:
        # integral of amp^2 exp(-2 omega d) for d in [d1, d2], d measured away from the interval
        if self.omega == 0.0:
            return amp * amp * (d2 - d1)
        w2 = 2.0 * self.omega
        hi = 0.0 if math.isinf(d2) else math.exp(-w2 * d2)
        return amp * amp * (math.exp(-w2 * d1) - hi) / w2

    def integral_sq(self, x1: float = -math.inf, x2: float = math.inf) -> float:
        """Closed-form integral of ``v**2`` over ``[x1, x2]``."""
        if x2 <= x1:
            return 0.0
        total = 0.0
        if x1 < self.start:
            a, _ = self.left_tail()
            total += self._tail_integral(a, max(self.start - x2, 0.0), self.start - x1)
        if x2 > self.stop:
            a, _ = self.right_tail()
            total += self._tail_integral(a, max(x1 - self.stop, 0.0), x2 - self.stop)
        for p in self._pieces:
            c0, c1 = max(p.left, x1), min(p.right, x2)
            if c1 <= c0:
                continue
            u, du, ls = self._piece_state(p, c0)
            total += math.exp(2.0 * (ls - self.log_scale)) * square_integral(p.s, c1 - c0, u, du)
        return total

    def weighted_integral(self, g: Potential) -> float:
        """Closed-form integral of ``g(x) v(x)**2`` for piecewise-constant g."""
        return sum(v * self.integral_sq(a, b) for a, b, v in g.pieces if v != 0.0)

    def continuity_defects(self) -> list[float]:
        """Relative jumps of ``(v, v')`` at interior breakpoints (interfaces excluded)."""
        out = []
        for prev, nxt in zip(self._pieces, self._pieces[1:]):
            if prev.right == self.interface:
                continue
            u1, d1, l1 = self._piece_state(prev, prev.right)
            u0, d0, l0 = nxt.state.u, nxt.state.du, nxt.state.logscale
            scale = math.exp(max(l0, l1))
            a = (math.exp(l1) * u1 - math.exp(l0) * u0) / scale
            b = (math.exp(l1) * d1 - math.exp(l0) * d0) / scale
            out.append(math.hypot(a, b))
        return out
