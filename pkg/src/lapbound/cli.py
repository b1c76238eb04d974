"""Command-line driver: estimate on files, grid sweeps, local dumps.

Exit codes: 0 on success, 2 for input or configuration problems, 3 for
numerical failures (incompatible right-hand side, solver breakdown, desk
scale exceeded).  Reports go to stdout unless ``--output`` is given;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .baseline import (
    gauss_seidel,
    minimize_bound_alternating,
    random_initial_guess,
    reference_solution,
)
from .errors import (
    DimensionMismatchError,
    GraphValidationError,
    IncompatibleRHSError,
    LapboundError,
    NoConvergenceError,
    ParseError,
    ProblemTooLargeError,
    UnsupportedFormatError,
)
from .estimator import EstimateConfig, error_estimate
from .graph import energy_seminorm
from .ingest import preprocess, read_matrix_market, sample_and_rhs, uniform_grid
from .report import (
    ExperimentReport,
    ReportRow,
    comparator_to_csv,
    per_edge_table,
    report_to_csv,
    report_to_json,
)

_INPUT_ERRORS = (
    OSError,
    ParseError,
    UnsupportedFormatError,
    GraphValidationError,
    DimensionMismatchError,
    ValueError,
)
_NUMERICAL_ERRORS = (IncompatibleRHSError, NoConvergenceError, ProblemTooLargeError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lapbound",
        description="Guaranteed a posteriori error bounds for graph Laplacian solves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--sweeps", type=int, default=3, help="correction sweeps")
        p.add_argument(
            "--basis",
            choices=["fundamental", "face"],
            default=None,
            help="cycle basis kind (default: fundamental, face on grids)",
        )
        p.add_argument(
            "--decomposition",
            choices=["vertex", "single-cycle"],
            default="vertex",
        )
        p.add_argument(
            "--sweep-order", choices=["ascending", "random"], default="ascending"
        )
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument(
            "--smoother-iterations",
            type=int,
            default=3,
            help="Gauss-Seidel sweeps producing the approximate solution; "
            "0 estimates the zero guess",
        )
        p.add_argument("--output", "-o", type=Path, default=None)

    def graph_input(p):
        p.add_argument("--input", type=Path, required=True, help="Matrix Market file")
        p.add_argument(
            "--rhs", type=Path, default=None, help="whitespace-separated values"
        )
        p.add_argument(
            "--project-rhs",
            action="store_true",
            help="subtract the mean from the right-hand side",
        )
        p.add_argument("--with-true-error", action="store_true")

    est = sub.add_parser("estimate", help="estimate error on an ingested graph")
    graph_input(est)
    common(est)
    est.add_argument("--format", choices=["csv", "json"], default="csv")
    est.set_defaults(func=cmd_estimate)

    dump = sub.add_parser("dump-local", help="per-edge estimate values")
    graph_input(dump)
    common(dump)
    dump.add_argument("--format", choices=["json", "csv"], default="json")
    dump.set_defaults(func=cmd_dump_local)

    grid = sub.add_parser("grid-experiment", help="benchmark sweep on lattice levels")
    grid.add_argument("--levels", default="5,6,7", help="comma list, e.g. 5,6,7")
    grid.add_argument("--sweeps-set", default="1,3,5", help="comma list of counts")
    grid.add_argument(
        "--decomposition", choices=["vertex", "single-cycle"], default="vertex"
    )
    grid.add_argument("--output", "-o", type=Path, default=None)
    grid.set_defaults(func=cmd_grid_experiment)

    cmp = sub.add_parser("compare-baseline", help="flow estimate vs two-term bound")
    graph_input(cmp)
    common(cmp)
    cmp.add_argument(
        "--max-iter", type=int, default=50, help="alternating minimization cap"
    )
    cmp.set_defaults(func=cmd_compare_baseline)
    return parser


def _load_problem(args):
    entries, n = read_matrix_market(args.input)
    g = preprocess(entries, n)
    if args.rhs is not None:
        f = np.loadtxt(args.rhs, dtype=np.float64).reshape(-1)
        if f.shape != (g.n,):
            raise DimensionMismatchError(
                f"rhs file has {f.size} values, graph has {g.n} vertices"
            )
    else:
        f = np.random.default_rng(args.seed).standard_normal(g.n)
        f -= f.mean()
    if args.project_rhs:
        f = f - f.mean()
    if args.smoother_iterations == 0:
        v = np.zeros(g.n)
    else:
        v0 = random_initial_guess(g, args.seed + 1)
        v = gauss_seidel(g, f, v0, args.smoother_iterations)
    return g, v, f


def _estimate_config(args, with_true_error=None):
    return EstimateConfig(
        basis=args.basis,
        decomposition=args.decomposition,
        sweeps=args.sweeps,
        sweep_order=args.sweep_order,
        seed=args.seed + 2,
        with_true_error=(
            args.with_true_error if with_true_error is None else with_true_error
        ),
    )


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def cmd_estimate(args) -> int:
    g, v, f = _load_problem(args)
    cfg = _estimate_config(args)
    start = time.perf_counter()
    est = error_estimate(g, v, f, cfg)
    seconds = time.perf_counter() - start
    report = ExperimentReport(seed=args.seed)
    report.add(ReportRow.from_estimate(args.input.stem, g, est, seconds))
    text = report_to_csv(report) if args.format == "csv" else report_to_json(report)
    _emit(text, args.output)
    return 0


def cmd_dump_local(args) -> int:
    g, v, f = _load_problem(args)
    cfg = _estimate_config(args, with_true_error=False)
    est = error_estimate(g, v, f, cfg)
    u = reference_solution(g, f) if args.with_true_error else None
    table = per_edge_table(g, est, u=u, v=None if u is None else v)
    if args.format == "json":
        payload = {
            "label": args.input.stem,
            "psi": est.psi,
            "sum_psi_e_sq": float(np.sum(est.per_edge**2)),
            "sweeps": est.sweeps,
            "per_edge": table,
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        cols = ["i", "j", "w", "psi_e"] + (["err_e"] if u is not None else [])
        lines = [",".join(cols)]
        for rec in table:
            lines.append(",".join(f"{rec[c]:.10g}" for c in cols))
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 0


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated integer list, got {text!r}") from exc
    if not values:
        raise ValueError("empty list")
    return values


def cmd_grid_experiment(args) -> int:
    levels = _parse_int_list(args.levels)
    sweep_counts = _parse_int_list(args.sweeps_set)
    report = ExperimentReport(seed=None)
    for level in levels:
        grid = uniform_grid(level)
        u, f = sample_and_rhs(grid)
        v = np.zeros(grid.graph.n)
        # the sample solves Lu = f exactly, so the true error needs no solve
        true_error = energy_seminorm(grid.graph, u - v)
        for sweeps in sweep_counts:
            cfg = EstimateConfig(sweeps=sweeps, decomposition=args.decomposition)
            start = time.perf_counter()
            est = error_estimate(grid, v, f, cfg)
            seconds = time.perf_counter() - start
            report.add(
                ReportRow(
                    label=f"level{level}",
                    n=grid.graph.n,
                    m=grid.graph.m,
                    psi=est.psi,
                    sweeps=sweeps,
                    seconds=seconds,
                    true_error=true_error,
                )
            )
    _emit(report_to_csv(report), args.output)
    return 0


def cmd_compare_baseline(args) -> int:
    g, v, f = _load_problem(args)
    u = reference_solution(g, f)
    true_error = energy_seminorm(g, u - v)
    cfg = _estimate_config(args, with_true_error=False)
    start = time.perf_counter()
    est = error_estimate(g, v, f, cfg)
    flow_seconds = time.perf_counter() - start
    start = time.perf_counter()
    state = minimize_bound_alternating(g, v, f, max_iter=args.max_iter)
    bound_seconds = time.perf_counter() - start
    text = comparator_to_csv(
        [
            ("flow-estimate", est.psi, true_error, flow_seconds),
            ("two-term-bound", state.bound, true_error, bound_seconds),
        ]
    )
    _emit(text, args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"lapbound: numerical failure: {exc}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as exc:
        print(f"lapbound: {exc}", file=sys.stderr)
        return 2
    except LapboundError as exc:
        print(f"lapbound: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
