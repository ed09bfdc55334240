"""Solvable limit models with a point interaction at the origin.

``S_alpha``: ``-d^2/dx^2 + W`` with ``u'(+0) - u'(-0) = alpha u(0)``.
``H(theta, eta)``: ``-d^2/dx^2 + W`` with ``u(+0) = theta u(-0)`` and
``u'(+0) = eta u(-0) + u'(-0) / theta``.

Both are handled by the line solver with a 2x2 jump matrix at x = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.optimize import brentq

from .errors import PreconditionError
from .potential import Potential, exponential_moment
from .propagator import Jump
from .spectrum import Problem, SpectralResult, half_bound_state, solve_problem

__all__ = [
    "InterfaceParams",
    "ThresholdResult",
    "interface_spectrum",
    "closed_form",
    "threshold_alpha0",
    "sine_moment",
    "harmonic_moment",
    "named_moment",
    "check_resonant_condition",
]


@dataclass(frozen=True)
class InterfaceParams:
    """Point interaction at the origin: ``delta`` (alpha) or ``theta_eta`` (theta, eta)."""

    kind: str
    alpha: float = 0.0
    theta: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("delta", "theta_eta"):
            raise PreconditionError("InterfaceParams", f"kind must be 'delta' or 'theta_eta', got {self.kind!r}")
        if self.kind == "theta_eta" and self.theta == 0.0:
            raise PreconditionError("InterfaceParams", "theta must be non-zero")

    @classmethod
    def delta(cls, alpha: float) -> "InterfaceParams":
        return cls("delta", alpha=float(alpha))

    @classmethod
    def theta_eta(cls, theta: float, eta: float) -> "InterfaceParams":
        return cls("theta_eta", theta=float(theta), eta=float(eta))

    @property
    def matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        if self.kind == "delta":
            return ((1.0, 0.0), (self.alpha, 1.0))
        return ((self.theta, 0.0), (self.eta, 1.0 / self.theta))


@dataclass(frozen=True)
class ThresholdResult:
    alpha0: float
    f_residual: float


def interface_problem(W: Potential, J: InterfaceParams) -> Problem:
    return Problem(W, jump=Jump(J.matrix, 0.0))


def interface_spectrum(W: Potential, J: InterfaceParams, tol: float = 1e-13) -> list[SpectralResult]:
    """Negative eigenvalues of ``-d^2/dx^2 + W`` with the interface J at the origin.

    A sign change of u imposed by the jump (theta < 0) is not counted as a
    node; with that convention node counts still count eigenvalues.
    """
    if not tol > 0:
        raise PreconditionError("interface_spectrum", f"tol must be positive, got {tol}")
    if W.min() < 0:
        raise PreconditionError("interface_spectrum", "background W must be non-negative")
    return solve_problem(interface_problem(W, J), tol, op="interface_spectrum")


def closed_form(J: InterfaceParams) -> Optional[float]:
    """Eigenvalue of the interface model with ``W = 0``, or None if there is none."""
    if J.kind == "delta":
        return -J.alpha ** 2 / 4.0 if J.alpha < 0 else None
    th, eta = J.theta, J.eta
    if eta * th < 0:
        return -(eta * th) ** 2 / (th * th + 1.0) ** 2
    return None


def sine_moment(b: float) -> Callable[[float], float]:
    """``alpha -> integral b^2 (1 + sin x) exp(alpha |x|) dx = -2 b^2 / alpha`` for alpha < 0."""
    return lambda alpha: -2.0 * b * b / alpha


def harmonic_moment(k: float) -> Callable[[float], float]:
    """``alpha -> integral k x^2 exp(alpha |x|) dx = -4 k / alpha^3`` for alpha < 0."""
    return lambda alpha: -4.0 * k / alpha ** 3


def named_moment(name: str) -> Callable[[float], float]:
    """Parse ``"sine:b"`` or ``"harmonic:k"``."""
    kind, _, arg = name.partition(":")
    try:
        value = float(arg)
    except ValueError:
        raise PreconditionError("threshold_alpha0", f"bad moment spec {name!r}; expected sine:b or harmonic:k") from None
    if kind == "sine":
        return sine_moment(value)
    if kind == "harmonic":
        if value <= 0:
            raise PreconditionError("threshold_alpha0", f"harmonic:k needs k > 0, got {value}")
        return harmonic_moment(value)
    raise PreconditionError("threshold_alpha0", f"unknown moment {kind!r}; expected sine or harmonic")


def threshold_alpha0(moment: Callable[[float], float] | Potential, tol: float = 1e-14) -> ThresholdResult:
    """Non-positive zero of ``f(alpha) = alpha + 2 * moment(alpha)``.

    ``moment`` is ``alpha -> integral W exp(alpha |x|) dx``, or a compact
    Potential W whose exponential moment is then taken in closed form.
    The callback is never evaluated at alpha = 0, where analytic moments of
    non-compact W diverge.
    """
    if isinstance(moment, Potential):
        moment = exponential_moment(moment)
    if not tol > 0:
        raise PreconditionError("threshold_alpha0", f"tol must be positive, got {tol}")

    def f(alpha: float) -> float:
        m = moment(alpha)
        if not math.isfinite(m):
            raise PreconditionError("threshold_alpha0", f"moment is not finite at alpha={alpha}")
        return alpha + 2.0 * m

    hi, fhi = -1.0, f(-1.0)
    lo, flo = hi, fhi
    while flo > 0:
        lo *= 2.0
        flo = f(lo)
        if lo < -1e300:
            raise PreconditionError("threshold_alpha0", "f has no non-positive zero")
    while fhi < 0 and hi < -1e-300:
        lo, flo = hi, fhi
        hi *= 0.5
        fhi = f(hi)
    if fhi < 0:
        # f < 0 arbitrarily close to 0: the zero is alpha0 = 0 (W = 0)
        return ThresholdResult(0.0, fhi)
    if flo == 0.0:
        return ThresholdResult(lo, 0.0)
    if fhi == 0.0:
        return ThresholdResult(hi, 0.0)
    root = brentq(f, lo, hi, xtol=tol, rtol=4 * 2.220446049250313e-16, maxiter=200)
    return ThresholdResult(root, f(root))


def check_resonant_condition(V: Potential, U: Potential, W: Potential) -> tuple[bool, float, float]:
    """Whether ``v-^2 int_{x<0} W + v+^2 int_{x>0} W < -1/2 int U v^2``."""
    hb = half_bound_state(V)
    if hb is None:
        raise PreconditionError("check_resonant_condition", "V is not resonant (|mismatch(V, 0)| > 1e-9)")
    left = sum(v * (min(b, 0.0) - a) for a, b, v in W.pieces if a < 0)
    right = sum(v * (b - max(a, 0.0)) for a, b, v in W.pieces if b > 0)
    lhs = hb.v_minus ** 2 * left + hb.v_plus ** 2 * right
    rhs = -0.5 * hb.solution.weighted_integral(U)
    return lhs < rhs, lhs, rhs
