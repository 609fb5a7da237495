"""Command-line front end.

Subcommands::

    stmaxwell solve    --case ex1 --n 12 [--mode tt] [--export DIR]
    stmaxwell converge --case ex1 --ns 6,10,14 --out ex1.csv
    stmaxwell condnum  --op a_lap --ns 4,6,8,10
    stmaxwell compare  --case ex1 --ns 8 --tt-tol 1e-10

Results go to ``--out`` (or stdout) as CSV or JSON; progress and summaries
go to stderr. Exit status is 0 on success, 1 on solver failure and 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .errors import MemoryCapError, SolverError
from .kron import CAP_ENV
from .maxwell.export import export_solution
from .maxwell.wave import Mode
from .verify.cases import CASE_NAMES, get_case
from .verify.conditioning import KINDS, OPERATORS
from .verify.study import ConvergenceStudy, SolveSettings, evaluate, run_comparison, run_condition, run_convergence

__all__ = ["build_parser", "parse_and_run", "main"]


class UsageError(Exception):
    pass


def _int_list(text: str) -> list:
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty N list")
    return out


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: csv)")


def _add_solver(p: argparse.ArgumentParser, mode: bool = True) -> None:
    if mode:
        p.add_argument("--mode", choices=[m.value for m in Mode], default="full", help="full grid or tensor train")
    p.add_argument("--tt-tol", type=_positive_float, default=1e-11, help="TT cross/rounding/AMEn tolerance")
    p.add_argument("--max-rank", type=_positive_int, default=200, help="TT rank ceiling for cross and AMEn")
    p.add_argument("--sweeps", type=_positive_int, default=50, help="maximum AMEn sweeps")
    p.add_argument("--seed", type=int, default=0, help="seed for cross and AMEn randomisation")


def _add_ns(p: argparse.ArgumentParser, default=None) -> None:
    g = p.add_mutually_exclusive_group(required=default is None)
    g.add_argument("--n", type=int, help="single resolution N (N+1 CGL points per axis)")
    g.add_argument("--ns", type=_int_list, help="comma-separated increasing resolutions")
    if default is not None:
        p.set_defaults(ns=default)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stmaxwell",
        description="Space-time Chebyshev solver for Maxwell's equations, full grid or tensor train.",
        epilog=f"Dense fallbacks are refused above {CAP_ENV} megabytes (default 1024).",
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("solve", help="solve one case at one N and report errors")
    p.add_argument("--case", choices=CASE_NAMES, required=True, help="manufactured case")
    p.add_argument("--n", type=int, required=True, help="resolution N")
    _add_solver(p)
    _add_output(p)
    p.add_argument("--timing", action="store_true", help="fill the seconds column (breaks byte-identical output)")
    p.add_argument("--export", type=Path, metavar="DIR", help="write the six field components to DIR")
    p.add_argument("--export-format", choices=("raw", "tt"), default="raw", help="raw float64 + JSON, or TT dump")

    p = sub.add_parser("converge", help="convergence study over several N")
    p.add_argument("--case", choices=CASE_NAMES, required=True, help="manufactured case")
    _add_ns(p)
    _add_solver(p)
    _add_output(p)
    p.add_argument("--timing", action="store_true", help="fill the seconds column (breaks byte-identical output)")

    p = sub.add_parser("condnum", help="condition numbers and fitted log-log slope")
    p.add_argument("--op", choices=OPERATORS, required=True, help="operator to probe")
    p.add_argument("--kind", choices=KINDS, default="svd", help="svd: s_max/s_min; eig: max|l|/min|l|")
    _add_ns(p)
    _add_output(p)

    p = sub.add_parser("compare", help="full-grid vs TT differences")
    p.add_argument("--case", choices=CASE_NAMES, required=True, help="manufactured case")
    _add_ns(p)
    _add_solver(p, mode=False)
    _add_output(p)
    return ap


def _ns(args) -> list:
    ns = [args.n] if getattr(args, "n", None) is not None else args.ns
    if any(n < 3 for n in ns):
        raise UsageError("N must be >= 3")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise UsageError("--ns must be strictly increasing")
    return ns


def _settings(args, mode=None) -> SolveSettings:
    return SolveSettings(mode or args.mode, args.tt_tol, args.max_rank, args.sweeps, args.seed)


def _emit(args, obj) -> None:
    text = obj.to_json() if args.format == "json" else obj.to_csv()
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _run(args) -> int:
    if args.command == "solve":
        if args.n < 3:
            raise UsageError("N must be >= 3")
        case = get_case(args.case)
        settings = _settings(args)
        t0 = time.perf_counter()
        sol = settings.solve(case, args.n)
        rep = evaluate(sol, case, time.perf_counter() - t0 if args.timing else None)
        _log(
            f"{case.name} N={args.n} {settings.mode.value}: err_E={rep.err_e:.3e} err_B={rep.err_b:.3e} "
            f"div_E={rep.div_e:.3e} div_B={rep.div_b:.3e} residual={rep.residual:.2e}"
        )
        if args.export is not None:
            export_solution(sol, args.export, args.export_format)
        _emit(args, ConvergenceStudy(case.name, settings.mode, (rep,)))
        return 0
    if args.command == "converge":
        case = get_case(args.case)
        study = run_convergence(case, _ns(args), _settings(args), args.timing, _log)
        rate = study.decay_rate("E")
        if rate is not None:
            _log(f"fitted log(err_E) slope in N: {rate:.3f}")
        _emit(args, study)
        return 1 if study.failures and not study.reports else 0
    if args.command == "condnum":
        rep = run_condition(args.op, _ns(args), args.kind)
        _log(f"{args.op} ({args.kind}) log-log slope: {rep.slope:.3f}")
        _emit(args, rep)
        return 0
    if args.command == "compare":
        cmp = run_comparison(get_case(args.case), _ns(args), _settings(args, Mode.TT))
        for n, d in cmp.rows:
            _log(f"N={n}: max full-vs-TT difference {max(d.values()):.3e}")
        _emit(args, cmp)
        return 0
    raise UsageError(f"unknown command {args.command!r}")


def parse_and_run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return _run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _log(f"stmaxwell: error: {exc}")
        return 2
    except SolverError as exc:
        res = f" (residual {exc.residual:.3e})" if getattr(exc, "residual", None) is not None else ""
        _log(f"stmaxwell: solver failure: {exc}{res}")
        return 1
    except (MemoryCapError, np.linalg.LinAlgError) as exc:
        _log(f"stmaxwell: solver failure: {exc}")
        return 1
    except ValueError as exc:
        _log(f"stmaxwell: error: {exc}")
        return 2


def main() -> None:
    sys.exit(parse_and_run())


if __name__ == "__main__":
    main()
