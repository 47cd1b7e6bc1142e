"""Command-line interface.

Subcommands mirror the pipeline stages (ingest, fit, score, sweep,
optimize, evaluate, compare, plot) plus `run` for the whole experiment.
Flags override config-file values which override defaults.

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cox import (
    FitConfig,
    PreprocessOptions,
    fit_cox,
    model_from_json,
    model_to_json,
    to_counting_process,
)
from .errors import DataError, NumericalError, UsageError
from .ingest import dataset_to_csv, load_dataset
from .pipeline import (
    ExperimentConfig,
    config_to_text,
    load_config,
    resolve_config,
    run_pipeline,
    write_atomic,
)
from .policy import CostParams, evaluate_policy, evaluations_to_csv
from .simulate import (
    LambdaGrid,
    SimulationConfig,
    bootstrap_sweep,
    compare_directed_vs_generic,
    comparison_to_json,
    default_grid,
    sweep_from_csv,
    sweep_to_csv,
)
from .svg import Series, emit_plot
from .trajectory import (
    score_dataset,
    summaries_to_csv,
    trajectories_from_csv,
    trajectories_to_csv,
)


def _out(path: str | None, content: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(content)
    else:
        write_atomic(Path(path), content)


def cmd_ingest(args) -> int:
    dataset = load_dataset(args.input, args.label)
    _out(args.output, dataset_to_csv(dataset))
    return 0


def cmd_fit(args) -> int:
    dataset = load_dataset(args.input, args.label)
    records, spec = to_counting_process(
        dataset.engines, PreprocessOptions(standardize=not args.no_standardize)
    )
    model = fit_cox(
        records,
        FitConfig(
            tolerance=args.tolerance,
            max_iterations=args.max_iterations,
            tie_method=args.ties,
        ),
        spec,
    )
    _out(args.output, model_to_json(model))
    return 0


def cmd_score(args) -> int:
    model = model_from_json(Path(args.model).read_text())
    dataset = load_dataset(args.input, args.label)
    trajectories = score_dataset(model, dataset, args.window)
    _out(args.output, trajectories_to_csv(trajectories))
    if args.summary:
        _out(args.summary, summaries_to_csv(trajectories))
    return 0


def _grid_from_args(args, trajectories) -> LambdaGrid:
    if args.grid_min is not None and args.grid_max is not None:
        return LambdaGrid(args.grid_min, args.grid_max, args.grid_step)
    return default_grid(trajectories, args.grid_step)


def cmd_sweep(args) -> int:
    trajectories = trajectories_from_csv(Path(args.trajectories).read_text())
    costs = CostParams(args.restoration_cost, args.replacement_cost)
    config = SimulationConfig(
        sample_size=min(args.sample_size, len(trajectories)),
        replications=args.replications,
        seed=args.seed,
        grid=_grid_from_args(args, trajectories),
    )
    result = bootstrap_sweep(trajectories, config, costs)
    _out(args.output, sweep_to_csv(result))
    return 0


def cmd_optimize(args) -> int:
    result = sweep_from_csv(Path(args.sweep).read_text())
    doc = {
        "optimal_lambda": result.optimal_lambda,
        "optimal_cost_mean": result.optimal_cost_mean,
        "optimal_prob_mean": result.optimal_prob_mean,
    }
    _out(args.output, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_evaluate(args) -> int:
    trajectories = trajectories_from_csv(Path(args.trajectories).read_text())
    costs = CostParams(args.restoration_cost, args.replacement_cost)
    evaluation = evaluate_policy(trajectories, args.threshold, costs)
    _out(args.output, evaluations_to_csv([evaluation]))
    return 0


def cmd_compare(args) -> int:
    per_results = {}
    per_traj = {}
    for label, sweep_path, traj_path in args.subset:
        per_results[label] = sweep_from_csv(Path(sweep_path).read_text())
        per_traj[label] = trajectories_from_csv(Path(traj_path).read_text())
    combined = sweep_from_csv(Path(args.combined).read_text())
    costs = CostParams(args.restoration_cost, args.replacement_cost)
    report = compare_directed_vs_generic(per_results, combined, per_traj, costs)
    _out(args.output, comparison_to_json(report) + "\n")
    return 0


def cmd_plot(args) -> int:
    result = sweep_from_csv(Path(args.sweep).read_text())
    lambdas = tuple(p.threshold for p in result.points)
    if args.kind == "cost":
        series = Series(
            "mean total cost",
            lambdas,
            tuple(p.cost_mean for p in result.points),
            std=tuple(p.cost_std for p in result.points),
        )
        ylabel = "total cost"
    else:
        series = Series(
            "mean failure probability",
            lambdas,
            tuple(p.prob_mean for p in result.points),
            std=tuple(p.prob_std for p in result.points),
        )
        ylabel = "failure probability"
    svg = emit_plot(
        [series],
        title=args.title or f"{args.kind} vs threshold",
        xlabel="threshold",
        ylabel=ylabel,
        hlines=[("lambda*", result.optimal_lambda)] if args.mark_optimum else [],
    )
    _out(args.output, svg)
    return 0


def cmd_run(args) -> int:
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides: dict[str, object] = {
        "smoothing_window": args.window,
        "restoration_cost": args.restoration_cost,
        "replacement_cost": args.replacement_cost,
        "sample_size": args.sample_size,
        "replications": args.replications,
        "seed": args.seed,
        "holdout_fraction": args.holdout_fraction,
        "holdout_seed": args.holdout_seed,
        "output_dir": args.output_dir,
    }
    if args.data:
        paths = dict(config.data_paths)
        for label, path in args.data:
            paths[label.upper()] = path
        overrides["data_paths"] = paths
    config = resolve_config(config, overrides)
    if args.print_config:
        sys.stdout.write(config_to_text(config))
        return 0
    run_pipeline(config)
    return 0


def _add_cost_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restoration-cost", type=float, default=3.5e6)
    p.add_argument("--replacement-cost", type=float, default=4.0e6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coxmaint",
        description="Hazard-model maintenance-threshold optimization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a measurement file to canonical CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default="FD001")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit the hazard model on a training file")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default="FD001")
    p.add_argument("--output", default="-")
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--ties", choices=["efron", "breslow"], default="efron")
    p.add_argument("--tolerance", type=float, default=1e-7)
    p.add_argument("--max-iterations", type=int, default=100)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score per-cycle hazard trajectories")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--label", default="FD001")
    p.add_argument("--window", type=int, default=1)
    p.add_argument("--output", default="-")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("sweep", help="bootstrap sweep of the threshold grid")
    p.add_argument("--trajectories", required=True)
    p.add_argument("--sample-size", type=int, default=30)
    p.add_argument("--replications", type=int, default=10)
    p.add_argument("--seed", type=int, default=20220)
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-step", type=float, default=0.5)
    p.add_argument("--output", default="-")
    _add_cost_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="select the optimal threshold from a sweep")
    p.add_argument("--sweep", required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="evaluate a threshold on trajectories")
    p.add_argument("--trajectories", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--output", default="-")
    _add_cost_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="directed vs generic strategy comparison")
    p.add_argument(
        "--subset",
        nargs=3,
        action="append",
        metavar=("LABEL", "SWEEP_CSV", "TRAJ_CSV"),
        required=True,
    )
    p.add_argument("--combined", required=True, help="combined sweep CSV")
    p.add_argument("--output", default="-")
    _add_cost_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render a sweep as an SVG chart")
    p.add_argument("--sweep", required=True)
    p.add_argument("--kind", choices=["cost", "prob"], default="cost")
    p.add_argument("--title")
    p.add_argument("--mark-optimum", action="store_true")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("run", help="run the full experiment pipeline")
    p.add_argument("--config")
    p.add_argument(
        "--data",
        nargs=2,
        action="append",
        metavar=("LABEL", "PATH"),
        help="training file for a subset (repeatable)",
    )
    p.add_argument("--window", type=int)
    p.add_argument("--restoration-cost", type=float)
    p.add_argument("--replacement-cost", type=float)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--holdout-fraction", type=float)
    p.add_argument("--holdout-seed", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--print-config", action="store_true")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
