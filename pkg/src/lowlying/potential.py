"""Compactly supported piecewise-constant potentials.

A :class:`Potential` stores breakpoints ``x0 < x1 < ... < xm`` and the value on
each open piece ``(x_{i-1}, x_i)``.  Everything the rest of the package does
(scaling, summation, moments, propagation) is exact on this representation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import PreconditionError

__all__ = [
    "Potential",
    "PotentialSpec",
    "make_piecewise",
    "scale",
    "sum_potentials",
    "moment",
    "builtin",
    "exponential_moment",
    "KINDS",
    "square_well",
    "square_barrier",
    "step_dipole",
    "constant",
    "parse_potential",
]

KINDS = ("square_well", "square_barrier", "step_dipole", "double_step", "custom")

# breakpoints closer than this fraction of the support length are merged in sum
MERGE_RTOL = 1e-12


@dataclass(frozen=True)
class Potential:
    """Piecewise-constant real function vanishing outside ``[x0, xm]``."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise PreconditionError("make_piecewise", "values must be non-empty")
        if len(bp) != len(vals) + 1:
            raise PreconditionError(
                "make_piecewise",
                f"need len(breakpoints) == len(values) + 1, got {len(bp)} and {len(vals)}",
            )
        if not all(math.isfinite(x) for x in bp + vals):
            raise PreconditionError("make_piecewise", "breakpoints and values must be finite")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise PreconditionError("make_piecewise", "breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, left: float = -1.0, right: float = 1.0) -> "Potential":
        return cls((left, right), (0.0,))

    @property
    def support(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def pieces(self) -> list[tuple[float, float, float]]:
        """List of ``(left, right, value)`` triples."""
        bp = self.breakpoints
        return [(bp[i], bp[i + 1], v) for i, v in enumerate(self.values)]

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def min(self) -> float:
        return min(self.values)

    def max(self) -> float:
        return max(self.values)

    def __call__(self, x):
        """Evaluate; right-continuous at interior breakpoints, zero outside the support."""
        x = np.asarray(x, dtype=float)
        bp = np.asarray(self.breakpoints)
        idx = np.searchsorted(bp, x, side="right") - 1
        vals = np.concatenate([self.values, [0.0]])
        inside = (x >= bp[0]) & (x < bp[-1])
        out = np.where(inside, vals[np.clip(idx, 0, len(self.values))], 0.0)
        return out if out.ndim else float(out)

    def __mul__(self, c: float) -> "Potential":
        return Potential(self.breakpoints, tuple(c * v for v in self.values))

    __rmul__ = __mul__

    def __neg__(self) -> "Potential":
        return self * -1.0

    def __add__(self, other: "Potential") -> "Potential":
        return sum_potentials([self, other])

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    def to_json(self) -> str:
        # float repr is the shortest string that round-trips bit-exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Potential":
        return cls(tuple(d["breakpoints"]), tuple(d["values"]))

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PotentialSpec:
    """Named potential family plus its parameters."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        return cls(d["kind"], dict(d.get("params", {})))


def make_piecewise(breakpoints: Sequence[float], values: Sequence[float]) -> Potential:
    return Potential(tuple(breakpoints), tuple(values))


def scale(P: Potential, eps: float, order: int) -> Potential:
    """Return ``x -> eps**(-order) * P(x / eps)``.

    Breakpoints are multiplied by ``eps`` and values by ``eps**(-order)``,
    so the result is exact.
    """
    if not eps > 0:
        raise PreconditionError("scale", f"eps must be positive, got {eps}")
    if order not in (1, 2):
        raise PreconditionError("scale", f"order must be 1 or 2, got {order}")
    if eps == 1.0:
        return P
    f = eps ** (-order)
    return Potential(tuple(eps * x for x in P.breakpoints), tuple(f * v for v in P.values))


def _merge_points(points: Iterable[float], tol: float) -> list[float]:
    pts = sorted(points)
    merged = [pts[0]]
    for x in pts[1:]:
        if x - merged[-1] > tol:
            merged.append(x)
    return merged


def sum_potentials(Ps: Sequence[Potential]) -> Potential:
    """Pointwise sum over the union of breakpoints.

    The result lives on the convex hull of the supports; gaps between
    disjoint supports become zero-valued pieces.
    """
    if len(Ps) == 0:
        raise PreconditionError("sum", "need at least one potential")
    if len(Ps) == 1:
        return Ps[0]
    lo = min(P.support[0] for P in Ps)
    hi = max(P.support[1] for P in Ps)
    tol = MERGE_RTOL * (hi - lo)
    bp = _merge_points((x for P in Ps for x in P.breakpoints), tol)
    # midpoints avoid evaluating exactly on (possibly merged) breakpoints
    mids = 0.5 * (np.asarray(bp[:-1]) + np.asarray(bp[1:]))
    vals = np.zeros(len(mids))
    for P in Ps:
        vals += P(mids)
    return Potential(tuple(bp), tuple(vals.tolist()))


def _power_integral(a: float, b: float, k: int) -> float:
    return (b ** (k + 1) - a ** (k + 1)) / (k + 1)


def moment(P: Potential, k: int = 0, negative_part_abs: bool = False) -> float:
    """Exact integral of ``x**k * P(x)``.

    With ``negative_part_abs`` the integrand is ``|x|**k * |min(P, 0)|``,
    the form that enters the eigenvalue-count bound.
    """
    if k < 0:
        raise PreconditionError("moment", f"k must be non-negative, got {k}")
    total = 0.0
    for a, b, v in P.pieces:
        if negative_part_abs:
            if v >= 0:
                continue
            w = -v
            # |x|^k is even: split pieces that straddle the origin
            if a < 0 < b:
                total += w * (_power_integral(0.0, -a, k) + _power_integral(0.0, b, k))
            elif b <= 0:
                total += w * _power_integral(-b, -a, k)
            else:
                total += w * _power_integral(a, b, k)
        else:
            total += v * _power_integral(a, b, k)
    return total


def exponential_moment(W: Potential):
    """Closed form of ``alpha -> integral W(x) exp(alpha |x|) dx`` for compact W."""
    pieces = []
    for a, b, v in W.pieces:
        if v == 0.0:
            continue
        if a < 0 < b:
            pieces += [(0.0, -a, v), (0.0, b, v)]
        elif b <= 0:
            pieces.append((-b, -a, v))
        else:
            pieces.append((a, b, v))

    def m(alpha: float) -> float:
        if alpha == 0.0:
            return sum(v * (r - l) for l, r, v in pieces)
        # exp(alpha*r) - exp(alpha*l) = exp(alpha*l) * expm1(alpha*(r-l))
        return sum(v * math.exp(alpha * l) * math.expm1(alpha * (r - l)) / alpha for l, r, v in pieces)

    return m


def _param(spec: PotentialSpec, name: str, default=None, positive=False) -> float:
    if name not in spec.params:
        if default is None:
            raise PreconditionError("builtin", f"{spec.kind} requires parameter {name!r}")
        return default
    val = float(spec.params[name])
    if positive and not val > 0:
        raise PreconditionError("builtin", f"{spec.kind}: parameter {name!r} must be positive, got {val}")
    return val


def builtin(spec: PotentialSpec | dict) -> Potential:
    """Build one of the named potential families.

    ``square_well`` (depth c): -c on (-w, w).
    ``square_barrier`` (height c): +c on (-w, w).
    ``step_dipole`` (height h): +h on (-w, 0), -h on (0, w); zero mean.
    ``double_step`` (height h, depth d, split s): +h on (-w, s), -d on (s, w).
    ``custom``: explicit breakpoints and values.

    ``half_width`` w defaults to 1.
    """
    if isinstance(spec, dict):
        spec = PotentialSpec.from_dict(spec)
    kind = spec.kind
    if kind not in KINDS:
        raise PreconditionError("builtin", f"unknown potential kind {kind!r}; expected one of {KINDS}")
    if kind == "custom":
        if "breakpoints" not in spec.params or "values" not in spec.params:
            raise PreconditionError("builtin", "custom requires 'breakpoints' and 'values'")
        return make_piecewise(spec.params["breakpoints"], spec.params["values"])
    w = _param(spec, "half_width", 1.0, positive=True)
    if kind == "square_well":
        c = _param(spec, "depth", positive=True)
        return Potential((-w, w), (-c,))
    if kind == "square_barrier":
        c = _param(spec, "height", positive=True)
        return Potential((-w, w), (c,))
    if kind == "step_dipole":
        h = _param(spec, "height", positive=True)
        return Potential((-w, 0.0, w), (h, -h))
    h = _param(spec, "height", positive=True)
    d = _param(spec, "depth", positive=True)
    s = _param(spec, "split", 0.0)
    if not -w < s < w:
        raise PreconditionError("builtin", f"double_step: split must lie in (-{w}, {w}), got {s}")
    return Potential((-w, s, w), (h, -d))


def square_well(depth: float, half_width: float = 1.0) -> Potential:
    return builtin(PotentialSpec("square_well", {"depth": depth, "half_width": half_width}))


def square_barrier(height: float, half_width: float = 1.0) -> Potential:
    return builtin(PotentialSpec("square_barrier", {"height": height, "half_width": half_width}))


def step_dipole(height: float, half_width: float = 1.0) -> Potential:
    return builtin(PotentialSpec("step_dipole", {"height": height, "half_width": half_width}))


def constant(value: float, left: float = -1.0, right: float = 1.0) -> Potential:
    return Potential((left, right), (value,))


def parse_potential(obj: dict) -> Potential:
    """Accept either a serialized Potential or a PotentialSpec mapping."""
    if "kind" in obj:
        return builtin(PotentialSpec.from_dict(obj))
    if "breakpoints" in obj and "values" in obj:
        return Potential.from_dict(obj)
    raise PreconditionError("parse_potential", "expected {'breakpoints','values'} or {'kind','params'}")
