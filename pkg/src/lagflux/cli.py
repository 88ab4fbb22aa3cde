"""Command-line entry point: ``lagflux {run,convergence,bench,riemann-exact}``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import ConfigError, LagfluxError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the config-error code rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str, n: int | None = None) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} numbers, got {text!r}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _state(text: str):
    return _floats(text, 3)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lagflux", description="Lagrange-flux compressible Euler solver")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run a case file or preset")
    run.add_argument("--case", required=True, help="case file or preset name")
    run.add_argument("--threads", type=int, help="worker threads (overrides LAGFLUX_THREADS)")
    run.add_argument("--dump-every", type=float, help="also dump every T time units")
    run.add_argument("--solver", choices=("lagflux", "lagremap1d", "advect2d"))
    run.add_argument("--out", default="out", help="output directory (default: out)")

    conv = sub.add_parser("convergence", help="L1 errors of a shock tube against the exact solution")
    conv.add_argument("--case", required=True)
    conv.add_argument("--meshes", type=_ints, default=[100, 400], help="comma-separated cell counts")
    conv.add_argument("--output", help="write CSV here instead of stdout")

    bench = sub.add_parser("bench", help="MCUPs and thread scaling")
    bench.add_argument("--case", required=True)
    bench.add_argument("--threads", type=_ints, default=[1])
    bench.add_argument("--steps", type=int, default=200)
    bench.add_argument("--warmup", type=int, default=5)

    rx = sub.add_parser("riemann-exact", help="sample the exact Riemann solution")
    rx.add_argument("--left", type=_state, required=True, metavar="RHO,U,P")
    rx.add_argument("--right", type=_state, required=True, metavar="RHO,U,P")
    rx.add_argument("--gamma", type=float, default=1.4)
    rx.add_argument("--time", type=float, required=True)
    rx.add_argument("--samples", type=int, default=200)
    rx.add_argument("--x0", type=float, default=0.5, help="initial jump position")
    rx.add_argument("--domain", type=lambda s: _floats(s, 2), default=(0.0, 1.0), metavar="A,B")
    return p


def _cmd_run(args) -> int:
    from .config import parse_case
    from .runner import run_case

    cfg = parse_case(args.case)
    changes = {}
    if args.solver:
        changes["solver"] = args.solver
    if args.dump_every is not None:
        changes["dump_every"] = args.dump_every
    if changes:
        cfg = cfg.replace(**changes)
    result = run_case(cfg, args.out, threads=args.threads)
    steps = result.state.step if result.state is not None else len(result.advection.times) - 1
    note = " (stopped at max_steps)" if result.truncated else ""
    print(f"{cfg.name}: {steps} steps{note}, {len(result.dumps)} dumps in {args.out}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    from .config import parse_case
    from .convergence import convergence_study, rows_csv

    text = rows_csv(convergence_study(parse_case(args.case), args.meshes))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_bench(args) -> int:
    from .bench import reports_csv, reports_table, scaling_sweep
    from .config import parse_case

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reports = scaling_sweep(parse_case(args.case), args.threads, args.warmup, args.steps)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    sys.stdout.write(reports_csv(reports))
    sys.stderr.write(reports_table(reports))
    return EXIT_OK


def _cmd_riemann(args) -> int:
    from .euler import PerfectGasEos, PrimitiveState
    from .oracle import exact_profile

    if args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    if args.time < 0:
        raise ConfigError("--time must be >= 0")
    a, b = args.domain
    x = a + (np.arange(args.samples) + 0.5) * (b - a) / args.samples
    (rl, ul, pl), (rr, ur, pr) = args.left, args.right
    prof = exact_profile(PrimitiveState(rl, ul, 0.0, pl), PrimitiveState(rr, ur, 0.0, pr),
                         PerfectGasEos(args.gamma), x, args.time, x0=args.x0)
    table = np.stack([x, prof.rho, prof.u, prof.p], axis=1)
    sys.stdout.write("x,rho,u,p\n")
    np.savetxt(sys.stdout, table, fmt="%.17g", delimiter=",")
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "convergence": _cmd_convergence, "bench": _cmd_bench, "riemann-exact": _cmd_riemann}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LagfluxError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostics", None)
        if diag is not None:
            print(f"diagnostics written to {diag}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
