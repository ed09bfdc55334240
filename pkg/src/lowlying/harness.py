"""Eps-sweeps of ``H_eps`` against the asymptotic predictions, plus count checks.

``H_eps = -d^2/dx^2 + W(x) + eps^-1 U(x/eps) + eps^-2 V(x/eps)`` is unitarily
equivalent to ``eps^-2 (-d^2/dt^2 + Q_eps)`` with
``Q_eps(t) = V(t) + eps U(t) + eps^2 W(eps t)``, so every spectrum is computed
in the fast variable t where all potentials are O(1).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .asymptotics import (
    CONVENTIONS,
    delta_prediction,
    low_lying_prediction,
    resonant_finite_prediction,
)
from .errors import ConvergenceError, PreconditionError
from .potential import Potential, moment, scale, sum_potentials
from .spectrum import (
    count_negative,
    half_bound_state,
    negative_eigenvalues,
    regge_eigenvalues,
    resonance_set,
)

__all__ = [
    "DEFAULT_EPS",
    "EXTERIOR_DELTA",
    "SweepConfig",
    "SweepRow",
    "CountReport",
    "assemble_scaled",
    "assemble_direct",
    "scaled_eigenvalues",
    "sweep",
    "fit_order",
    "verify_counting",
    "verify_bound",
    "report_dict",
    "write_json",
    "write_csv",
    "to_csv",
]

log = logging.getLogger(__name__)

DEFAULT_EPS = (0.08, 0.04, 0.02, 0.01)
# exterior mass is measured outside (-EXTERIOR_DELTA, EXTERIOR_DELTA) in x
EXTERIOR_DELTA = 0.25


def _check_eps(eps: float, op: str) -> None:
    if not 0.0 < eps < 1.0:
        raise PreconditionError(op, f"eps must lie in (0, 1), got {eps}")


@dataclass(frozen=True)
class SweepConfig:
    V: Potential
    U: Potential
    W: Potential
    eps_list: tuple[float, ...] = DEFAULT_EPS
    tol: float = 1e-13
    convention: str = "derivation_minus"
    output: Optional[str] = None

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_list)
        object.__setattr__(self, "eps_list", eps)
        if not eps:
            raise PreconditionError("sweep", "eps_list must be non-empty")
        for e in eps:
            _check_eps(e, "sweep")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise PreconditionError("sweep", "eps_list must be strictly decreasing")
        if not self.tol > 0:
            raise PreconditionError("sweep", f"tol must be positive, got {self.tol}")
        if self.convention not in CONVENTIONS:
            raise PreconditionError("sweep", f"convention must be one of {tuple(CONVENTIONS)}")
        for name in ("V", "U"):
            P = getattr(self, name)
            if not P.is_zero() and (P.support[0] < -1.0 or P.support[1] > 1.0):
                log.warning("support of %s is %s, outside the normalized interval [-1, 1]", name, P.support)

    def to_dict(self) -> dict:
        return {
            "V": self.V.to_dict(),
            "U": self.U.to_dict(),
            "W": self.W.to_dict(),
            "eps_list": list(self.eps_list),
            "tol": self.tol,
            "convention": self.convention,
        }


@dataclass(frozen=True)
class SweepRow:
    """One eps of a sweep; lists are aligned with ``eigenvalues`` (increasing).

    ``kinds`` marks each eigenvalue as ``low_lying`` (diverging like
    ``-omega^2 / eps^2``) or ``finite``.  Missing predictions are NaN.
    """

    eps: float
    eigenvalues: list[float]
    kinds: list[str]
    predictions_minus: list[float]
    predictions_plus: list[float]
    residuals: list[float]
    residuals_minus: list[float]
    residuals_plus: list[float]
    scaled: list[float]
    exterior_mass: list[float]


@dataclass(frozen=True)
class CountReport:
    n_T1: int
    n_regge: int
    resonances_in_01: list[float]
    reconciled: int
    consistent: bool
    bound_value: float
    bound_holds: bool
    literal_count: int = 0
    discrepancy: bool = False
    notes: list[str] = field(default_factory=list)


def assemble_scaled(V: Potential, U: Potential, W: Potential, eps: float) -> Potential:
    """``Q_eps(t) = V(t) + eps U(t) + eps^2 W(eps t)`` as one piecewise-constant potential."""
    _check_eps(eps, "assemble_scaled")
    parts = [V, eps * U]
    if not W.is_zero():
        # scale(W, 1/eps, 2)(t) = eps^2 W(eps t)
        parts.append(scale(W, 1.0 / eps, 2))
    return sum_potentials(parts)


def assemble_direct(V: Potential, U: Potential, W: Potential, eps: float) -> Potential:
    """The potential of ``H_eps`` in the original variable x."""
    _check_eps(eps, "assemble_direct")
    return sum_potentials([W, scale(U, eps, 1), scale(V, eps, 2)])


def scaled_eigenvalues(V: Potential, U: Potential, W: Potential, eps: float, tol: float = 1e-13) -> list[float]:
    """Negative eigenvalues of ``H_eps``, increasing."""
    res = negative_eigenvalues(assemble_scaled(V, U, W, eps), tol)
    return [r.eigenvalue / eps ** 2 for r in res]


def _finite_prediction(config: SweepConfig):
    """Callable eps -> predicted finite eigenvalue, or None if no theory applies."""
    V, U, W = config.V, config.U, config.W
    try:
        if V.is_zero():
            d = delta_prediction(W, U, config.tol)
            return d.predict
        if half_bound_state(V) is not None and W.is_zero():
            value = resonant_finite_prediction(V, U).value
            return lambda eps: value
    except PreconditionError as exc:
        log.info("no finite-eigenvalue prediction: %s", exc)
    return None


def sweep(config: SweepConfig) -> list[SweepRow]:
    """Spectra of ``H_eps`` for every eps in the config, with predictions and residuals."""
    V, U, W = config.V, config.U, config.W
    low = None
    if not V.is_zero() and count_negative(V) > 0:
        low = low_lying_prediction(V, U, config.convention, config.tol)
    finite = _finite_prediction(config)
    omega_min = min(low.omega) if low is not None else 0.0
    rows = []
    for eps in config.eps_list:
        try:
            results = negative_eigenvalues(assemble_scaled(V, U, W, eps), config.tol)
        except PreconditionError as exc:
            raise PreconditionError("sweep", f"at eps={eps}: {exc}") from exc
        except ConvergenceError as exc:
            raise ConvergenceError(f"sweep at eps={eps}: {exc}") from exc
        lam = [r.eigenvalue / eps ** 2 for r in results]
        scaled = [r.eigenvalue for r in results]
        kinds = ["low_lying" if low is not None and abs(s) >= omega_min ** 2 / 4 else "finite" for s in scaled]
        pm, pp = [], []
        n_low = 0
        for kind in kinds:
            if kind == "low_lying" and n_low < len(low):
                pm.append(low.predict(eps, "derivation_minus")[n_low])
                pp.append(low.predict(eps, "theorem_plus")[n_low])
                n_low += 1
            elif kind == "finite" and finite is not None:
                pm.append(finite(eps))
                pp.append(finite(eps))
            else:
                pm.append(math.nan)
                pp.append(math.nan)
        rm = [abs(a - b) for a, b in zip(lam, pm)]
        rp = [abs(a - b) for a, b in zip(lam, pp)]
        chosen = rm if config.convention == "derivation_minus" else rp
        cut = EXTERIOR_DELTA / eps
        ext = [r.eigenfunction.integral_sq(-math.inf, -cut) + r.eigenfunction.integral_sq(cut, math.inf)
               for r in results]
        rows.append(SweepRow(eps, lam, kinds, pm, pp, chosen, rm, rp, scaled, ext))
    return rows


def fit_order(pairs: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log(residual)`` against ``log(eps)``.

    Returns NaN when some residual is not positive (the residual has hit the
    rounding floor and no order can be read off).
    """
    if len(pairs) < 3:
        raise PreconditionError("fit_order", f"need at least 3 (eps, residual) pairs, got {len(pairs)}")
    eps = np.array([p[0] for p in pairs], dtype=float)
    res = np.array([p[1] for p in pairs], dtype=float)
    if np.any(eps <= 0):
        raise PreconditionError("fit_order", "eps values must be positive")
    if not np.all(res > 0):
        return math.nan
    slope, _ = np.polyfit(np.log(eps), np.log(res), 1)
    return float(slope)


def _fits(rows: list[SweepRow], which: str) -> dict[str, float]:
    out = {}
    kmax = max((len(r.eigenvalues) for r in rows), default=0)
    for k in range(kmax):
        pairs = [(r.eps, getattr(r, which)[k]) for r in rows if k < len(r.eigenvalues)]
        pairs = [(e, v) for e, v in pairs if not math.isnan(v)]
        if len(pairs) >= 3:
            out[str(k + 1)] = fit_order(pairs)
    return out


def verify_counting(V: Potential) -> CountReport:
    """Compare eigenvalue count, Regge count and resonance count for ``-d^2/dt^2 + V``."""
    if V.is_zero():
        raise PreconditionError("verify_counting", "V must not vanish identically")
    n_t1 = count_negative(V)
    n_regge = len(regge_eigenvalues(V))
    res = resonance_set(V, 0.0, 1.0)
    birth = 1 if moment(V, 0) <= 0 else 0
    reconciled = len(res) + birth
    bound = 1.0 + moment(V, 1, negative_part_abs=True)
    notes = []
    discrepancy = len(res) != n_t1
    if discrepancy:
        notes.append(f"|R(V) in (0,1)| = {len(res)} differs from the eigenvalue count {n_t1}; "
                     f"weak-coupling birth term {birth} reconciles it" if reconciled == n_t1 else
                     f"|R(V) in (0,1)| = {len(res)} differs from the eigenvalue count {n_t1}")
    return CountReport(n_t1, n_regge, res, reconciled, n_t1 == n_regge == reconciled,
                       bound, n_t1 <= bound, len(res), discrepancy, notes)


def verify_bound(V: Potential, U: Potential, W: Potential, eps: float) -> tuple[int, float, bool]:
    """``N_eps <= 1 + int |t| V^- + eps int |t| U^- + int |x| W^-`` (all moments exact)."""
    _check_eps(eps, "verify_bound")
    n = count_negative(assemble_scaled(V, U, W, eps))
    bound = (1.0 + moment(V, 1, negative_part_abs=True) + eps * moment(U, 1, negative_part_abs=True)
             + moment(W, 1, negative_part_abs=True))
    return n, bound, n <= bound


def _clean(x: float):
    return None if isinstance(x, float) and math.isnan(x) else x


def report_dict(config: SweepConfig, rows: list[SweepRow]) -> dict:
    """Report in the documented JSON layout; NaN becomes null."""
    def clean(xs):
        return [_clean(x) for x in xs]

    out_rows = [{
        "eps": r.eps,
        "eigenvalues": clean(r.eigenvalues),
        "kinds": r.kinds,
        "predictions_minus": clean(r.predictions_minus),
        "predictions_plus": clean(r.predictions_plus),
        "residuals": clean(r.residuals),
        "residuals_minus": clean(r.residuals_minus),
        "residuals_plus": clean(r.residuals_plus),
        "scaled": clean(r.scaled),
        "exterior_mass": clean(r.exterior_mass),
    } for r in rows]
    which = "residuals_minus" if config.convention == "derivation_minus" else "residuals_plus"
    fits = {k: _clean(v) for k, v in _fits(rows, which).items()}
    worst = {name: max((x for r in rows for x in getattr(r, f"residuals_{name}") if not math.isnan(x)), default=None)
             for name in ("minus", "plus")}
    preferred = None
    if worst["minus"] is not None and worst["plus"] is not None and worst["minus"] != worst["plus"]:
        preferred = "derivation_minus" if worst["minus"] < worst["plus"] else "theorem_plus"
    return {
        "config": config.to_dict(),
        "rows": out_rows,
        "fits": fits,
        "sign": {"max_residual_minus": worst["minus"], "max_residual_plus": worst["plus"],
                 "preferred": preferred},
    }


def write_json(config: SweepConfig, rows: list[SweepRow], path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report_dict(config, rows), fh, indent=2)
        fh.write("\n")


CSV_COLUMNS = ("eps", "k", "lambda", "pred_minus", "pred_plus", "resid_minus", "resid_plus", "ext_mass")


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".17g")


def to_csv(rows: list[SweepRow]) -> str:
    """Flat CSV, one line per (eps, eigenvalue); k is 1-based in increasing eigenvalue order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        for k, lam in enumerate(r.eigenvalues):
            w.writerow([_fmt(r.eps), k + 1, _fmt(lam), _fmt(r.predictions_minus[k]), _fmt(r.predictions_plus[k]),
                        _fmt(r.residuals_minus[k]), _fmt(r.residuals_plus[k]), _fmt(r.exterior_mass[k])])
    return buf.getvalue()


def write_csv(rows: list[SweepRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(rows))
