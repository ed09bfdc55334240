"""Coefficients of the small-eps expansions for ``H_eps``.

``H_eps = -d^2/dx^2 + W(x) + eps^-1 U(x/eps) + eps^-2 V(x/eps)``.

* Low-lying eigenvalues: ``-eps^-2 (omega_k + s eps kappa_k)^2 + O(1)``.
* Delta-like limit (V = 0): ``lambda_0 + eps lambda_1 + O(eps^2)``.
* Resonant V: a finite eigenvalue tending to ``-(int U v^2)^2 / (v-^2 + v+^2)^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import PreconditionError
from .point_models import InterfaceParams, interface_spectrum
from .potential import Potential, moment
from .spectrum import half_bound_state, negative_eigenvalues

__all__ = [
    "CONVENTIONS",
    "LowLyingPrediction",
    "DeltaPrediction",
    "ResonantPrediction",
    "low_lying_prediction",
    "delta_prediction",
    "resonant_finite_prediction",
    "existence_verdict",
    "gamma_symmetric",
    "gamma_ordered",
]

# sign s in omega_k + s * eps * kappa_k
CONVENTIONS = {"derivation_minus": -1.0, "theorem_plus": 1.0}


def _sign(convention: str) -> float:
    if convention not in CONVENTIONS:
        raise PreconditionError("low_lying_prediction", f"convention must be one of {tuple(CONVENTIONS)}, got {convention!r}")
    return CONVENTIONS[convention]


@dataclass(frozen=True)
class LowLyingPrediction:
    """Decay rates ``omega_k`` (decreasing) and first-order corrections ``kappa_k``."""

    omega: tuple[float, ...]
    kappa: tuple[float, ...]
    sign_convention: str = "derivation_minus"

    def predict(self, eps: float, convention: str | None = None) -> list[float]:
        """Predicted ``lambda_k(eps)`` in increasing order."""
        s = _sign(convention or self.sign_convention)
        return [-((w + s * eps * k) / eps) ** 2 for w, k in zip(self.omega, self.kappa)]

    def __len__(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class DeltaPrediction:
    lambda0: float
    lambda1: float
    gamma: float
    alpha1: float
    psi0: float
    dpsi_left: float
    dpsi_right: float
    gamma_ordered: float = field(default=math.nan, compare=False)

    def predict(self, eps: float) -> float:
        return self.lambda0 + eps * self.lambda1


@dataclass(frozen=True)
class ResonantPrediction:
    value: float
    threshold_a: float


def low_lying_prediction(V: Potential, U: Potential, convention: str = "derivation_minus",
                         tol: float = 1e-13) -> LowLyingPrediction:
    """``kappa_k = int U v_k^2 / (2 omega_k ||v_k||^2)`` for each bound state of ``-d^2/dx^2 + V``."""
    _sign(convention)
    results = negative_eigenvalues(V, tol)
    if not results:
        raise PreconditionError("low_lying_prediction", "V has no negative eigenvalues")
    omega, kappa = [], []
    for r in results:
        v = r.eigenfunction
        omega.append(r.omega)
        kappa.append(v.weighted_integral(U) / (2.0 * r.omega * v.integral_sq()))
    return LowLyingPrediction(tuple(omega), tuple(kappa), convention)


def _pieces(U: Potential) -> list[tuple[float, float, float]]:
    return [(a, b, v) for a, b, v in U.pieces if v != 0.0]


def gamma_symmetric(U: Potential) -> float:
    """``1/2 * double integral of U(t) |t - tau| U(tau)``.

    Uses ``F(x) = -|x|^3 / 6``: the mixed derivative of ``F(t - tau)`` is
    ``|t - tau|``, so its integral over ``[a, b] x [c, d]`` is
    ``F(b-d) - F(b-c) - F(a-d) + F(a-c)``.
    """
    def F(x: float) -> float:
        return -abs(x) ** 3 / 6.0

    total = 0.0
    for a, b, u in _pieces(U):
        for c, d, w in _pieces(U):
            total += u * w * (F(b - d) - F(b - c) - F(a - d) + F(a - c))
    return 0.5 * total


def gamma_ordered(U: Potential) -> float:
    """Double integral of ``U(t) (t - tau) U(tau)`` over ``tau < t``."""
    ps = _pieces(U)
    total = 0.0
    for i, (a, b, u) in enumerate(ps):
        ell = b - a
        # both points in the same piece
        total += u * u * ell ** 3 / 6.0
        for c, d, w in ps[:i]:
            # piece (c, d) lies entirely left of (a, b)
            total += u * w * ell * (d - c) * (0.5 * (a + b) - 0.5 * (c + d))
    return total


def delta_prediction(W: Potential, U: Potential, tol: float = 1e-13) -> DeltaPrediction:
    """``lambda_1 = gamma psi(0)^2 + alpha_1 psi(0) (psi'(-0) + psi'(+0))`` for ``S_alpha``, ``alpha = int U``."""
    near = [v for a, b, v in W.pieces if a <= 0.0 <= b]
    if len(near) > 1 and any(v != near[0] for v in near):
        raise PreconditionError("delta_prediction", "W must be constant in a neighborhood of 0")
    alpha = moment(U, 0)
    results = interface_spectrum(W, InterfaceParams.delta(alpha), tol)
    if not results:
        raise PreconditionError("delta_prediction", f"S_alpha with alpha = int U = {alpha} has no negative eigenvalue")
    r = results[0]
    psi = r.eigenfunction
    psi0, dl = psi.state_at(0.0, "left")
    _, dr = psi.state_at(0.0, "right")
    g = gamma_symmetric(U)
    a1 = moment(U, 1)
    lam1 = g * psi0 ** 2 + a1 * psi0 * (dl + dr)
    return DeltaPrediction(r.eigenvalue, lam1, g, a1, psi0, dl, dr, gamma_ordered(U))


def resonant_finite_prediction(V: Potential, U: Potential) -> ResonantPrediction:
    """Limit ``-(int U v^2)^2 / (v-^2 + v+^2)^2`` of the finite eigenvalue for resonant V."""
    hb = half_bound_state(V)
    if hb is None:
        raise PreconditionError("resonant_finite_prediction", "V is not resonant (|mismatch(V, 0)| > 1e-9)")
    integral = hb.solution.weighted_integral(U)
    if not integral < 0:
        raise PreconditionError("resonant_finite_prediction",
                                f"int U v^2 = {integral} must be negative for a finite eigenvalue")
    denom = hb.v_minus ** 2 + hb.v_plus ** 2
    a = integral / denom
    value = -(integral / denom) ** 2
    return ResonantPrediction(value, a)


def existence_verdict(V: Potential) -> bool:
    """True iff V is not identically zero and ``int V <= 0``."""
    return (not V.is_zero()) and moment(V, 0) <= 0.0


def residuals(computed: Sequence[float], predicted: Sequence[float]) -> list[float]:
    return [abs(c - p) for c, p in zip(computed, predicted)]
