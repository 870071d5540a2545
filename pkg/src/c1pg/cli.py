"""Command-line driver.

    c1pg study --problem ex1a --k 3 --meshes 4,8,16,32 --eps 0.001 --seed 42 --out results.csv
    c1pg rates results.csv
    c1pg solve --problem ex1a --k 3 --M 8 --probe 11 --out samples.csv

Failures exit nonzero and print one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .problems import PROBLEMS
from .solve import SolveError
from .study import (CsvFormatError, StudyConfig, StudyError, format_rate_table,
                    read_csv, run_study, solve_once)


def _mesh_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c1pg", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("study", help="run a convergence study and write a CSV")
    st.add_argument("--problem", choices=sorted(PROBLEMS), default="ex1a")
    st.add_argument("--k", type=int, default=3)
    st.add_argument("--meshes", type=_mesh_list, default=(4, 8, 16, 32))
    st.add_argument("--eps", type=float, default=0.001)
    st.add_argument("--seed", type=int, default=42)
    st.add_argument("--out", default="results.csv")
    st.add_argument("--quad", type=int, default=None, help="Gauss points per direction")
    st.add_argument("--line-samples", type=int, default=None)
    st.add_argument("--emit-plot", action="store_true", help="also write a gnuplot script")

    rt = sub.add_parser("rates", help="print observed orders from a study CSV")
    rt.add_argument("csv")

    so = sub.add_parser("solve", help="solve once and dump samples on a probe grid")
    so.add_argument("--problem", choices=sorted(PROBLEMS), default="ex1a")
    so.add_argument("--k", type=int, default=3)
    so.add_argument("--M", type=int, default=8)
    so.add_argument("--N", type=int, default=None)
    so.add_argument("--eps", type=float, default=0.001)
    so.add_argument("--seed", type=int, default=42)
    so.add_argument("--quad", type=int, default=None)
    so.add_argument("--probe", type=int, default=11)
    so.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    return parser


def _fail(kind: str, message: str, code: int = 1, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def _study(args) -> int:
    config = StudyConfig(problem=args.problem, k=args.k, meshes=args.meshes, eps=args.eps,
                         seed=args.seed, quad=args.quad, line_samples=args.line_samples,
                         out=args.out, emit_plot=args.emit_plot)
    result = run_study(config)
    rows = result.rows()
    print(f"wrote {args.out} ({len(rows)} levels)")
    for (M, _), t in zip(result.sizes, result.wall_times):
        print(f"  M=N={M}: {t:.3f} s")
    print(format_rate_table(rows, result.rates or None), end="")
    return 0


def _rates(args) -> int:
    rows = read_csv(args.csv)
    print(format_rate_table(rows), end="")
    return 0


def _solve(args) -> int:
    N = args.M if args.N is None else args.N
    data = solve_once(args.problem, args.k, args.M, N, args.eps, args.seed, args.probe, args.quad)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("x,y,u_h,u,u_h-u\n")
        np.savetxt(out, data, delimiter=",", fmt="%.17g")
    finally:
        if args.out:
            out.close()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"study": _study, "rates": _rates, "solve": _solve}
    try:
        return handlers[args.command](args)
    except StudyError as exc:
        return _fail("solver_failure", str(exc), level=exc.level)
    except SolveError as exc:
        return _fail("solver_failure", str(exc))
    except CsvFormatError as exc:
        return _fail("csv_malformed", str(exc), row=exc.row, column=exc.column)
    except (ValueError, OSError) as exc:
        return _fail("invalid_input", str(exc), code=2)


if __name__ == "__main__":
    sys.exit(main())
