"""Command-line interface: ``lowlying <subcommand> [options]``.

Potentials are given as inline JSON, either ``{"breakpoints": [...],
"values": [...]}`` or ``{"kind": "square_well", "params": {"depth": 10}}``,
or as ``@path`` to a file holding the same JSON.

Exit codes: 0 success, 1 domain error (a violated precondition), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import acceptance, asymptotics, harness, point_models, spectrum
from .errors import ConvergenceError, PreconditionError
from .potential import Potential, parse_potential

__all__ = ["run", "main", "build_parser"]


class UsageError(Exception):
    pass


def fmt_table(x) -> str:
    """Six significant digits for human-readable output."""
    if isinstance(x, (int, bool)) or x is None:
        return str(x)
    s = format(x, ".6g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def fmt_machine(x) -> str:
    if isinstance(x, (int, bool)) or x is None:
        return str(x)
    return format(x, ".17g")


def load_potential(text: Optional[str]) -> Potential:
    if text is None:
        return Potential.zero()
    if text.startswith("@"):
        try:
            with open(text[1:]) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read potential file {text[1:]!r}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"potential is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError("potential JSON must be an object")
    try:
        return parse_potential(obj)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed potential: {exc}") from None


def parse_eps(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _emit(out, fmt: str, header: Sequence[str], rows: Sequence[Sequence], payload) -> None:
    """Write ``payload`` as JSON, ``rows`` as CSV, or an aligned table."""
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    if fmt == "csv":
        out.write(",".join(header) + "\n")
        for r in rows:
            out.write(",".join(fmt_machine(x) for x in r) + "\n")
        return
    cells = [list(header)] + [[fmt_table(x) for x in r] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    for c in cells:
        out.write("  ".join(s.rjust(w) for s, w in zip(c, widths)).rstrip() + "\n")


def cmd_eigs(args, out) -> int:
    res = spectrum.negative_eigenvalues(load_potential(args.potential), args.tol)
    rows = [(r.node_index, r.omega, r.eigenvalue, r.mismatch_residual) for r in res]
    payload = [{"node_index": r.node_index, "omega": r.omega, "lambda": r.eigenvalue,
                "mismatch_residual": r.mismatch_residual} for r in res]
    _emit(out, args.format, ("k", "omega", "lambda", "residual"), rows, payload)
    return 0


def cmd_regge(args, out) -> int:
    ws = spectrum.regge_eigenvalues(load_potential(args.potential), args.tol)
    _emit(out, args.format, ("omega",), [(w,) for w in ws], ws)
    return 0


def cmd_count(args, out) -> int:
    q = load_potential(args.potential)
    if not args.report:
        out.write(f"{spectrum.count_negative(q)}\n")
        return 0
    rep = harness.verify_counting(q)
    payload = dict(rep.__dict__)
    if args.format == "json":
        _emit(out, "json", (), (), payload)
    else:
        for k, v in payload.items():
            if isinstance(v, list):
                v = "[" + ", ".join(fmt_table(x) if isinstance(x, float) else str(x) for x in v) + "]"
            out.write(f"{k}: {fmt_table(v) if isinstance(v, float) else v}\n")
    return 0


def cmd_resonances(args, out) -> int:
    pts = spectrum.resonance_set(load_potential(args.potential), args.lo, args.hi, args.tol)
    _emit(out, args.format, ("alpha",), [(a,) for a in pts], pts)
    return 0


def cmd_theta_eta(args, out) -> int:
    theta, eta = spectrum.theta_eta(load_potential(args.V), load_potential(args.U))
    _emit(out, args.format, ("theta", "eta"), [(theta, eta)], {"theta": theta, "eta": eta})
    return 0


def cmd_threshold(args, out) -> int:
    if (args.moment is None) == (args.W is None):
        raise UsageError("threshold needs exactly one of --moment or --W")
    source = point_models.named_moment(args.moment) if args.moment else load_potential(args.W)
    res = point_models.threshold_alpha0(source, args.tol)
    _emit(out, args.format, ("alpha0", "f_residual"), [(res.alpha0, res.f_residual)],
          {"alpha0": res.alpha0, "f_residual": res.f_residual})
    return 0


def cmd_predict(args, out) -> int:
    if args.model == "low-lying":
        p = asymptotics.low_lying_prediction(load_potential(args.V), load_potential(args.U), args.convention)
        rows = [(k + 1, w, kap) for k, (w, kap) in enumerate(zip(p.omega, p.kappa))]
        payload = {"convention": p.sign_convention, "omega": list(p.omega), "kappa": list(p.kappa)}
        _emit(out, args.format, ("k", "omega", "kappa"), rows, payload)
    elif args.model == "delta":
        p = asymptotics.delta_prediction(load_potential(args.W), load_potential(args.U))
        payload = {k: getattr(p, k) for k in ("lambda0", "lambda1", "gamma", "alpha1", "psi0", "dpsi_left", "dpsi_right")}
        _emit(out, args.format, tuple(payload), [tuple(payload.values())], payload)
    else:
        p = asymptotics.resonant_finite_prediction(load_potential(args.V), load_potential(args.U))
        payload = {"value": p.value, "threshold_a": p.threshold_a}
        _emit(out, args.format, ("value", "threshold_a"), [(p.value, p.threshold_a)], payload)
    return 0


def cmd_sweep(args, out) -> int:
    config = harness.SweepConfig(load_potential(args.V), load_potential(args.U), load_potential(args.W),
                                 args.eps, args.tol, args.convention, args.output)
    rows = harness.sweep(config)
    if args.format == "csv":
        text = harness.to_csv(rows)
    else:
        text = json.dumps(harness.report_dict(config, rows), indent=2) + "\n"
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_verify(args, out) -> int:
    numbers = args.criteria or sorted(acceptance.CRITERIA)
    unknown = [n for n in numbers if n not in acceptance.CRITERIA]
    if unknown:
        raise UsageError(f"unknown criteria {unknown}; choose from {sorted(acceptance.CRITERIA)}")
    results = acceptance.run_all(numbers)
    for r in results:
        out.write(r.line() + "\n")
    passed = sum(r.passed for r in results)
    out.write(f"{passed}/{len(results)} criteria passed\n")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowlying", description="Negative spectra, resonances and eps-asymptotics "
                                     "for 1D Schroedinger operators with piecewise-constant potentials.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, fn, help, fmt=("table", "json", "csv")):
        p = sub.add_parser(name, help=help, description=help)
        p.set_defaults(func=fn)
        if fmt:
            p.add_argument("--format", choices=fmt, default=fmt[0])
        return p

    p = add("eigs", cmd_eigs, "negative eigenvalues of -d^2/dx^2 + q")
    p.add_argument("--potential", required=True)
    p.add_argument("--tol", type=positive, default=1e-13)

    p = add("regge", cmd_regge, "positive Regge eigenvalues on [-1, 1]")
    p.add_argument("--potential", required=True)
    p.add_argument("--tol", type=positive, default=1e-13)

    p = add("count", cmd_count, "number of negative eigenvalues", fmt=("table", "json"))
    p.add_argument("--potential", required=True)
    p.add_argument("--report", action="store_true", help="full counting report (Regge, resonances, bound)")

    p = add("resonances", cmd_resonances, "couplings alpha in (lo, hi) with alpha*V resonant")
    p.add_argument("--potential", required=True)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--tol", type=positive, default=1e-11)

    p = add("theta-eta", cmd_theta_eta, "interface parameters (theta, eta) of resonant V with perturbation U")
    p.add_argument("--V", required=True)
    p.add_argument("--U", required=True)

    p = add("threshold", cmd_threshold, "non-positive zero alpha0 of alpha + 2 int W exp(alpha |x|)")
    p.add_argument("--moment", help="named analytic moment: sine:b or harmonic:k")
    p.add_argument("--W", help="compact background potential")
    p.add_argument("--tol", type=positive, default=1e-14)

    p = add("predict", cmd_predict, "asymptotic coefficients")
    p.add_argument("model", choices=("low-lying", "delta", "resonant"))
    p.add_argument("--V")
    p.add_argument("--U")
    p.add_argument("--W")
    p.add_argument("--convention", choices=tuple(asymptotics.CONVENTIONS), default="derivation_minus")

    p = add("sweep", cmd_sweep, "eps-sweep of H_eps against the predictions", fmt=("json", "csv"))
    p.add_argument("--V")
    p.add_argument("--U")
    p.add_argument("--W")
    p.add_argument("--eps", type=parse_eps, default=harness.DEFAULT_EPS, help="comma-separated, decreasing")
    p.add_argument("--tol", type=positive, default=1e-13)
    p.add_argument("--convention", choices=tuple(asymptotics.CONVENTIONS), default="derivation_minus")
    p.add_argument("--output", help="write the report here instead of stdout")

    p = add("verify", cmd_verify, "run the acceptance suite", fmt=None)
    p.add_argument("--criteria", type=int, nargs="*", help="subset of criterion numbers")
    return parser


def _check_predict(args) -> None:
    if args.command != "predict":
        return
    need = {"low-lying": ("V", "U"), "delta": ("W", "U"), "resonant": ("V", "U")}[args.model]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"predict {args.model} requires {' '.join(missing)}")


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """Run the CLI and return its exit code."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _check_predict(args)
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lowlying: error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, ConvergenceError) as exc:
        print(f"lowlying: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
