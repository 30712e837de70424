"""Command-line benchmark harness.

Subcommands: eval (pointwise error CSV), sweep (step-size study), timing
(wall-clock measurement), solve (fractional initial value problems).  Exit
codes: 0 success, 2 configuration error, 3 numerical failure (nonexistent
derivative or root-find breakdown).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    open_out,
    run_eval_experiment,
    run_sweep,
    run_timing,
)
from .core import (
    DerivMode,
    FractionalOrder,
    QuadKind,
    SchemeConfig,
    StepperKind,
    eta_grid,
)
from .errors import ConfigError, ConvergenceFailureError, DerivativeUnavailableError
from .fde import SolveFor, ZenerParams, solve_fde, zener_rhs
from .oracles import PowerFunction, caputo_power

_QUAD = {"gauss": QuadKind.COMPOUND_GAUSS, "cc": QuadKind.COMPOUND_CC}
_STEP = {"be": StepperKind.BACKWARD_EULER, "trap": StepperKind.TRAPEZOIDAL}
_DERIV = {"exact": DerivMode.EXACT, "mod1": DerivMode.MOD1, "mod2": DerivMode.MOD2}


def _parse_fn(spec: str) -> PowerFunction:
    kind, _, arg = spec.partition(":")
    if kind != "pow" or not arg:
        raise ConfigError(f"unsupported test function {spec!r}; expected pow:<p>")
    return PowerFunction(p=float(arg))


def _parse_pair(spec: str) -> tuple[float, float]:
    parts = [float(s) for s in spec.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated values, got {spec!r}")
    return parts[0], parts[1]


def _shared_flags(sub: argparse.ArgumentParser, with_h: bool = True):
    sub.add_argument("--alpha", type=float, required=True)
    sub.add_argument("--fn", default="pow:1.6", help="test function, pow:<p>")
    sub.add_argument("--t-end", type=float, default=3.0)
    if with_h:
        sub.add_argument("--h", type=float, required=True)
    sub.add_argument("--quad", choices=sorted(_QUAD), default="gauss")
    sub.add_argument("--J", type=int, default=25)
    sub.add_argument("--K", type=int, default=10)
    sub.add_argument("--eta-exps", default="-5,5", help="min,max grid exponents")
    sub.add_argument("--stepper", choices=sorted(_STEP), default="be")
    sub.add_argument("--deriv", choices=sorted(_DERIV), default="exact")
    sub.add_argument("--out", default="-", help="CSV path; - = stdout")


def _config(args, h=None) -> SchemeConfig:
    lo, hi = _parse_pair(args.eta_exps)
    return SchemeConfig(
        order=FractionalOrder(args.alpha),
        J=args.J,
        eta=eta_grid(args.K, lo, hi),
        quad_kind=_QUAD[args.quad],
        stepper_kind=_STEP[args.stepper],
        deriv_mode=_DERIV[args.deriv],
        h=args.h if h is None else h,
        T=args.t_end,
    )


def _emit(args, write):
    fh, own = open_out(args.out)
    try:
        write(fh)
    finally:
        if own:
            fh.close()


def _cmd_eval(args) -> int:
    report = run_eval_experiment(_config(args), _parse_fn(args.fn))
    _emit(args, report.write_csv)
    print(
        f"max_abs_error={report.max_abs_error:.6e} "
        f"terminal_abs_error={report.terminal_abs_error:.6e}",
        file=sys.stderr,
    )
    return 0


def _cmd_sweep(args) -> int:
    h_list = [float(s) for s in args.h_list.split(",")]
    table = run_sweep(
        _config(args, h=h_list[0]),
        h_list,
        _parse_fn(args.fn),
        metric=args.metric,
    )
    _emit(args, table.write_csv)
    level = "none" if table.saturation_level is None else f"{table.saturation_level:.3e}"
    print(f"slope={table.slope:.4f} saturation_level={level}", file=sys.stderr)
    return 0


def _cmd_timing(args) -> int:
    report = run_timing([_config(args)], _parse_fn(args.fn), repetitions=args.reps)
    _emit(args, report.write_csv)
    return 0


def _cmd_solve(args) -> int:
    config = _config(args)
    if args.manufactured:
        pf = _parse_fn(args.manufactured)
        exact = lambda t: caputo_power(config.order, pf, t)  # noqa: E731

        def f(t, _y):
            return exact(t)

        traj = solve_fde(f, args.y0, config)
        reference = pf(traj.times)
    elif args.zener:
        a0, a1, m, b1 = (float(s) for s in args.zener.split(","))
        params = ZenerParams(a0=a0, a1=a1, m=m, b1=b1, order=config.order)
        sigma0 = args.forcing_const
        f = zener_rhs(params, lambda t: sigma0, SolveFor.STRAIN, config)
        traj = solve_fde(f, args.y0, config)
        reference = None
    else:
        raise ConfigError("solve needs --manufactured pow:<p> or --zener a0,a1,m,b1")

    def write(fh):
        if reference is None:
            fh.write("t,y,residual\n")
            for i, t in enumerate(traj.times):
                r = "" if i == 0 else format(traj.residuals[i - 1], ".17g")
                fh.write(f"{t:.17g},{traj.samples[i]:.17g},{r}\n")
        else:
            fh.write("t,y,exact,abs_error,residual\n")
            for i, t in enumerate(traj.times):
                r = "" if i == 0 else format(traj.residuals[i - 1], ".17g")
                fh.write(
                    f"{t:.17g},{traj.samples[i]:.17g},{reference[i]:.17g},"
                    f"{abs(traj.samples[i] - reference[i]):.17g},{r}\n"
                )

    _emit(args, write)
    if reference is not None:
        print(
            f"max_abs_error={np.max(np.abs(traj.samples - reference)):.6e}",
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="riss-bench",
        description="Fast Caputo-derivative evaluation and FDE solving benchmarks",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="pointwise derivative errors for one config")
    _shared_flags(sp)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("sweep", help="error vs step size with slope estimate")
    _shared_flags(sp, with_h=False)
    sp.add_argument("--h-list", required=True, help="comma-separated decreasing h")
    sp.add_argument("--metric", choices=["terminal", "max"], default="terminal")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("timing", help="median wall time of a series evaluation")
    _shared_flags(sp)
    sp.add_argument("--reps", type=int, default=3)
    sp.set_defaults(func=_cmd_timing)

    sp = sub.add_parser("solve", help="solve D^alpha y = f(t, y), y(0) = y0")
    _shared_flags(sp)
    sp.add_argument("--y0", type=float, default=0.0)
    sp.add_argument("--zener", help="a0,a1,m,b1 material coefficients")
    sp.add_argument("--forcing-const", type=float, default=1.0,
                    help="constant forcing level for --zener (creep test)")
    sp.add_argument("--manufactured", help="manufactured solution, pow:<p>")
    sp.set_defaults(func=_cmd_solve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (DerivativeUnavailableError, ConvergenceFailureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
