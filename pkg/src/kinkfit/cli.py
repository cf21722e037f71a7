"""Command-line interface.

Subcommands: ``eval`` (tabulate the closed forms), ``check`` (numerically
cross-verify them), ``simulate`` (reproducible synthetic CSV), ``fit``
(two-stage parameter estimation from CSV), ``plot`` (SVG rendering).
Exit codes: 0 success, 1 runtime failure (verification failed,
non-convergence, I/O failure), 2 bad usage or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__, fit, io, model, oracle
from .errors import (
    InsufficientData,
    KinkfitError,
    MalformedHeader,
    MalformedRecord,
    NonFiniteValue,
)
from .model import TransitionParams

# Default demonstration parameters: the transition used throughout the docs,
# with gamma = 40 as a representative mid-sharpness choice.
DEMO_ALPHA = 10.7
DEMO_BETA = 80.0
DEMO_GAMMA = 40.0
DEMO_PHI_C = 0.598
DEMO_F_C = 0.5
DEMO_PHI_LO = 0.57
DEMO_PHI_HI = 0.63


class UsageError(Exception):
    """Bad flag combination or flag value; exits with status 2."""


def _demo_params() -> TransitionParams:
    return TransitionParams(DEMO_ALPHA, DEMO_BETA, DEMO_GAMMA, DEMO_PHI_C, DEMO_F_C)


def _build_params(alpha, beta, gamma, phi_c, f_c) -> TransitionParams:
    try:
        return TransitionParams(alpha, beta, gamma, phi_c, f_c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_param_flags(parser: argparse.ArgumentParser, with_defaults: bool) -> None:
    defaults = (
        (DEMO_ALPHA, DEMO_BETA, DEMO_GAMMA, DEMO_PHI_C, DEMO_F_C)
        if with_defaults
        else (None, None, None, None, None)
    )
    parser.add_argument("--alpha", type=float, default=defaults[0], help="lower slope")
    parser.add_argument("--beta", type=float, default=defaults[1], help="upper slope")
    parser.add_argument(
        "--gamma", type=float, default=defaults[2], help="transition sharpness (> 0)"
    )
    parser.add_argument(
        "--phi-c", type=float, default=defaults[3], help="transition location"
    )
    parser.add_argument(
        "--f-c", type=float, default=defaults[4], help="observable value at phi-c"
    )


def _params_from_args(args: argparse.Namespace) -> TransitionParams:
    return _build_params(args.alpha, args.beta, args.gamma, args.phi_c, args.f_c)


def _provenance(command: str, args: argparse.Namespace, keys: Sequence[str]) -> dict:
    record = {"command": command}
    for key in keys:
        record[key] = getattr(args, key)
    return record


def _echo_stderr(record: dict) -> None:
    print(json.dumps(record), file=sys.stderr)


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_output(path: str, payload: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(payload)


def _expand_phi_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--phi-range must be lo:hi:n, got {text!r}")
    try:
        lo = float(parts[0])
        hi = float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"--phi-range must be lo:hi:n, got {text!r}") from None
    if n < 1:
        raise UsageError(f"--phi-range count must be >= 1, got {n}")
    if n == 1:
        return [lo]
    return [lo + i * (hi - lo) / (n - 1) for i in range(n)]


def cmd_eval(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    phis: list[float] = list(args.phi or [])
    if args.phi_range:
        phis.extend(_expand_phi_range(args.phi_range))
    if not phis:
        raise UsageError("provide at least one --phi or a --phi-range")
    _echo_stderr(
        _provenance(
            "eval",
            args,
            ("alpha", "beta", "gamma", "phi_c", "f_c", "phi", "phi_range", "csv"),
        )
    )
    rows = [
        (p, model.slope(p, params), model.value(p, params), model.piecewise_limit(p, params))
        for p in phis
    ]
    if args.csv:
        print("phi,s,F,F_limit")
        for row in rows:
            print(",".join(f"{v:.17g}" for v in row))
    else:
        print(f"{'phi':>16} {'slope':>16} {'value':>16} {'piecewise_limit':>16}")
        for row in rows:
            print(" ".join(f"{v:>16.8g}" for v in row))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    phi_lo = args.phi_lo if args.phi_lo is not None else params.phi_c - 0.03
    phi_hi = args.phi_hi if args.phi_hi is not None else params.phi_c + 0.03
    if not phi_lo < params.phi_c < phi_hi:
        raise UsageError(
            f"need --phi-lo < phi_c < --phi-hi, got {phi_lo!r}, {params.phi_c!r}, {phi_hi!r}"
        )
    if args.samples < 3:
        raise UsageError("--samples must be >= 3")
    if args.ode_step <= 0 or args.quad_tol <= 0 or args.slope_tol <= 0 or args.value_tol <= 0:
        raise UsageError("steps and tolerances must be > 0")
    report = oracle.verify_closed_forms(
        params,
        phi_lo,
        phi_hi,
        n_samples=args.samples,
        ode_step=args.ode_step,
        quad_tol=args.quad_tol,
        use_beta_linear=args.use_literal_eq4,
    )
    passed = (
        report.max_slope_deviation <= args.slope_tol
        and report.max_value_deviation <= args.value_tol
    )
    payload = {
        "passed": passed,
        "max_slope_deviation": report.max_slope_deviation,
        "max_value_deviation": report.max_value_deviation,
        "settings": {
            "alpha": params.alpha,
            "beta": params.beta,
            "gamma": params.gamma,
            "phi_c": params.phi_c,
            "f_c": params.f_c,
            "phi_lo": phi_lo,
            "phi_hi": phi_hi,
            "samples": args.samples,
            "ode_step": args.ode_step,
            "quad_tol": args.quad_tol,
            "slope_tol": args.slope_tol,
            "value_tol": args.value_tol,
            "use_literal_eq4": args.use_literal_eq4,
        },
    }
    print(json.dumps(payload, indent=2))
    return 0 if passed else 1


def cmd_simulate(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    try:
        spec = io.SyntheticSpec(
            params=params,
            n=args.n,
            phi_lo=args.phi_lo,
            phi_hi=args.phi_hi,
            noise_sigma=args.sigma,
            seed=args.seed,
            sampling=args.sampling,
            model=args.model,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = io.generate_synthetic(spec)
    _write_output(args.output, io.write_dataset(data))
    record = _provenance(
        "simulate",
        args,
        (
            "alpha",
            "beta",
            "gamma",
            "phi_c",
            "f_c",
            "n",
            "phi_lo",
            "phi_hi",
            "sigma",
            "seed",
            "sampling",
            "model",
            "output",
        ),
    )
    _echo_stderr(record)
    return 0


def _fit_config(args: argparse.Namespace) -> fit.FitConfig:
    try:
        return fit.FitConfig(
            max_iterations=args.max_iterations,
            step_tol=args.step_tol,
            sse_tol=args.sse_tol,
            lambda0=args.lambda0,
            lambda_up=args.lambda_up,
            lambda_down=args.lambda_down,
            gamma_max=args.gamma_max,
            breakpoint_grid=args.breakpoint_grid,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_fit(args: argparse.Namespace) -> int:
    config = _fit_config(args)
    data = io.read_dataset(_read_input(args.input))
    pw = fit.fit_piecewise(data, config)
    init = fit.init_smooth(pw, data)
    result = fit.fit_smooth(data, init, config)
    payload = {
        "piecewise": {
            "alpha": pw.alpha,
            "beta": pw.beta,
            "phi_c": pw.phi_c,
            "f_c": pw.f_c,
            "sse": pw.sse,
            "candidate_count": pw.candidate_count,
        },
        "smooth": {
            "alpha": result.params.alpha,
            "beta": result.params.beta,
            "gamma": result.params.gamma,
            "phi_c": result.params.phi_c,
            "f_c": result.params.f_c,
            "sse": result.sse,
            "iterations": result.iterations,
            "converged": result.converged,
            "gamma_at_bound": result.gamma_at_bound,
            "std_errors": list(result.std_errors) if result.std_errors else None,
        },
        "settings": {
            "input": args.input,
            "max_iterations": args.max_iterations,
            "step_tol": args.step_tol,
            "sse_tol": args.sse_tol,
            "lambda0": args.lambda0,
            "lambda_up": args.lambda_up,
            "lambda_down": args.lambda_down,
            "gamma_max": args.gamma_max,
            "breakpoint_grid": args.breakpoint_grid,
        },
    }
    print(json.dumps(payload, indent=2))
    return 0 if result.converged else 1


def _curve_series(role: str, fn, lo: float, hi: float, n: int, insert=None) -> io.Series:
    xs = list(np.linspace(lo, hi, n))
    if insert is not None and lo < insert < hi:
        xs = sorted(set(xs) | {float(insert)})
    return io.Series(role=role, x=tuple(xs), y=tuple(fn(x) for x in xs))


def cmd_plot(args: argparse.Namespace) -> int:
    params_given = any(
        getattr(args, k) is not None for k in ("alpha", "beta", "gamma", "phi_c", "f_c")
    )
    if args.figure1 and (params_given or args.input):
        raise UsageError("--figure1 cannot be combined with explicit parameters or --input")
    if args.overlay_fit and not args.input:
        raise UsageError("--overlay-fit requires --input")
    if not (args.figure1 or params_given or args.input):
        raise UsageError("nothing to plot: give --figure1, model parameters, or --input")
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")

    series: list[io.Series] = []
    if args.figure1:
        params = _demo_params()
        series.append(
            _curve_series(
                "limit-curve",
                lambda x: model.piecewise_limit(x, params),
                DEMO_PHI_LO,
                DEMO_PHI_HI,
                args.samples,
                insert=params.phi_c,
            )
        )
    elif params_given:
        params = _build_params(
            args.alpha if args.alpha is not None else DEMO_ALPHA,
            args.beta if args.beta is not None else DEMO_BETA,
            args.gamma if args.gamma is not None else DEMO_GAMMA,
            args.phi_c if args.phi_c is not None else DEMO_PHI_C,
            args.f_c if args.f_c is not None else DEMO_F_C,
        )
        series.append(
            _curve_series(
                "model-curve",
                lambda x: model.value(x, params),
                args.phi_lo,
                args.phi_hi,
                args.samples,
                insert=params.phi_c,
            )
        )

    if args.input:
        data = io.read_dataset(_read_input(args.input))
        if not len(data):
            raise UsageError(f"{args.input!r} contains no data rows")
        series.append(io.Series(role="data-points", x=data.phi, y=data.f))
        if args.overlay_fit:
            config = fit.FitConfig()
            pw = fit.fit_piecewise(data, config)
            result = fit.fit_smooth(data, fit.init_smooth(pw, data), config)
            lo = float(data.phi[0])
            hi = float(data.phi[-1])

            def hinge(x: float) -> float:
                d = x - pw.phi_c
                return pw.f_c + pw.alpha * min(d, 0.0) + pw.beta * max(d, 0.0)

            series.append(
                _curve_series("limit-curve", hinge, lo, hi, args.samples, insert=pw.phi_c)
            )
            series.append(
                _curve_series(
                    "model-curve",
                    lambda x: model.value(x, result.params),
                    lo,
                    hi,
                    args.samples,
                    insert=result.params.phi_c,
                )
            )

    _echo_stderr(
        _provenance(
            "plot",
            args,
            (
                "figure1",
                "alpha",
                "beta",
                "gamma",
                "phi_c",
                "f_c",
                "input",
                "overlay_fit",
                "phi_lo",
                "phi_hi",
                "samples",
                "width",
                "height",
                "output",
            ),
        )
    )
    try:
        plot_spec = io.PlotSpec(series=tuple(series), width=args.width, height=args.height)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_output(args.output, io.render_svg(plot_spec))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinkfit",
        description="Evaluate, verify, simulate, fit and plot smooth two-slope transition curves.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="tabulate slope, value and the sharp limit")
    _add_param_flags(p_eval, with_defaults=True)
    p_eval.add_argument(
        "--phi", type=float, action="append", help="evaluation point (repeatable)"
    )
    p_eval.add_argument(
        "--phi-range", help="lo:hi:n uniform evaluation points (inclusive)"
    )
    p_eval.add_argument(
        "--csv", action="store_true", help="emit CSV (phi,s,F,F_limit) instead of a table"
    )
    p_eval.set_defaults(handler=cmd_eval)

    p_check = sub.add_parser(
        "check", help="re-integrate the model numerically and compare to the closed forms"
    )
    _add_param_flags(p_check, with_defaults=True)
    p_check.add_argument(
        "--phi-lo", type=float, default=None, help="window start (default phi_c - 0.03)"
    )
    p_check.add_argument(
        "--phi-hi", type=float, default=None, help="window end (default phi_c + 0.03)"
    )
    p_check.add_argument("--samples", type=int, default=25, help="grid size")
    p_check.add_argument("--ode-step", type=float, default=2e-6, help="RK4 step")
    p_check.add_argument(
        "--quad-tol", type=float, default=1e-10, help="quadrature absolute tolerance"
    )
    p_check.add_argument(
        "--slope-tol", type=float, default=1e-9, help="pass bound on slope deviation"
    )
    p_check.add_argument(
        "--value-tol", type=float, default=1e-8, help="pass bound on value deviation"
    )
    p_check.add_argument(
        "--use-literal-eq4",
        action="store_true",
        help="check the diagnostic observable variant whose linear term uses beta; "
        "it fails the quadrature comparison whenever alpha != beta",
    )
    p_check.set_defaults(handler=cmd_check)

    p_sim = sub.add_parser("simulate", help="write a reproducible synthetic dataset")
    _add_param_flags(p_sim, with_defaults=True)
    p_sim.add_argument("--n", type=int, default=50, help="number of points")
    p_sim.add_argument("--phi-lo", type=float, default=DEMO_PHI_LO)
    p_sim.add_argument("--phi-hi", type=float, default=DEMO_PHI_HI)
    p_sim.add_argument("--sigma", type=float, default=0.0, help="noise std deviation")
    p_sim.add_argument("--seed", type=int, default=0, help="PCG64 seed")
    p_sim.add_argument("--sampling", choices=("grid", "random"), default="grid")
    p_sim.add_argument("--model", choices=("smooth", "piecewise"), default="smooth")
    p_sim.add_argument("-o", "--output", default="-", help="output path ('-' = stdout)")
    p_sim.set_defaults(handler=cmd_simulate)

    p_fit = sub.add_parser("fit", help="fit the hinge and smooth models to a CSV dataset")
    p_fit.add_argument("-i", "--input", default="-", help="input path ('-' = stdin)")
    p_fit.add_argument("--max-iterations", type=int, default=200)
    p_fit.add_argument("--step-tol", type=float, default=1e-10)
    p_fit.add_argument("--sse-tol", type=float, default=1e-12)
    p_fit.add_argument("--lambda0", type=float, default=1e-3)
    p_fit.add_argument("--lambda-up", type=float, default=10.0)
    p_fit.add_argument("--lambda-down", type=float, default=0.1)
    p_fit.add_argument("--gamma-max", type=float, default=1e8)
    p_fit.add_argument(
        "--breakpoint-grid",
        type=int,
        default=None,
        help="uniform breakpoint candidates (default: midpoints of distinct phi)",
    )
    p_fit.set_defaults(handler=cmd_fit)

    p_plot = sub.add_parser("plot", help="render curves and/or data to SVG")
    _add_param_flags(p_plot, with_defaults=False)
    p_plot.add_argument(
        "--figure1",
        action="store_true",
        help="plot the sharp-limit transition with the default demonstration parameters",
    )
    p_plot.add_argument("-i", "--input", default=None, help="CSV dataset to scatter")
    p_plot.add_argument(
        "--overlay-fit",
        action="store_true",
        help="fit the input data and overlay both fitted curves",
    )
    p_plot.add_argument("--phi-lo", type=float, default=DEMO_PHI_LO)
    p_plot.add_argument("--phi-hi", type=float, default=DEMO_PHI_HI)
    p_plot.add_argument("--samples", type=int, default=601, help="curve sample count")
    p_plot.add_argument("--width", type=float, default=640.0)
    p_plot.add_argument("--height", type=float, default=480.0)
    p_plot.add_argument("-o", "--output", default="-", help="output path ('-' = stdout)")
    p_plot.set_defaults(handler=cmd_plot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"kinkfit: error: {exc}", file=sys.stderr)
        return 2
    except (MalformedHeader, MalformedRecord, NonFiniteValue, InsufficientData) as exc:
        print(f"kinkfit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except KinkfitError as exc:
        print(f"kinkfit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"kinkfit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"kinkfit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
