"""Command-line entry points for the experiment harness."""

from __future__ import annotations

import argparse
import sys

from .bench import (
    CompareResult,
    DatasetConfig,
    DynamicMode,
    ExperimentConfig,
    FixedMode,
    RunResult,
    ScheduledAddMode,
    ScheduledRemoveMode,
    all_dynamic_combinations,
    compare_dynamic_vs_fixed,
    run_experiment,
    sweep_tree_count,
    write_checkpoints_csv,
    write_compare_csv,
    write_summary_csv,
)
from .forest import ComparisonTest, DynamicConfig
from .stats import TrackerKind
from .tree import LeafStrategy

DEFAULT_COUNTS = "1,2,3,5,8,10,15,20,30,50"


def _parse_dataset(args) -> DatasetConfig:
    value = args.dataset
    if value.startswith("csv:"):
        return DatasetConfig(
            source="csv",
            path=value[len("csv:"):],
            label_column=args.csv_label_column,
            has_header=args.csv_header,
            window_size=args.csv_window,
            label_drift_shift=args.label_drift_shift,
            shuffle_seed=args.shuffle_seed,
        )
    if value not in ("rbf-stable", "rbf-drift"):
        raise ValueError(f"unknown dataset {value!r}; use rbf-stable, rbf-drift, or csv:<path>")
    return DatasetConfig(
        source=value,
        n_points=args.points,
        drift_speed=args.drift_speed,
        stream_seed=args.stream_seed,
        label_drift_shift=args.label_drift_shift,
        shuffle_seed=args.shuffle_seed,
    )


def _parse_dynamic(value: str) -> DynamicConfig:
    parts = value.split(",")
    if len(parts) != 3:
        raise ValueError("--dynamic takes <add>,<tracker>,<test> (e.g. count,fading,sum-std)")
    strategies = {s.value: s for s in LeafStrategy}
    trackers = {t.value: t for t in TrackerKind}
    tests = {t.value: t for t in ComparisonTest}
    add, tracker, test = (part.strip() for part in parts)
    if add not in strategies:
        raise ValueError(f"unknown addition strategy {add!r}; choose from {sorted(strategies)}")
    if tracker not in trackers:
        raise ValueError(f"unknown tracker kind {tracker!r}; choose from {sorted(trackers)}")
    if test not in tests:
        raise ValueError(f"unknown comparison test {test!r}; choose from {sorted(tests)}")
    return DynamicConfig(addition_strategy=strategies[add],
                         tracker_kind=trackers[tracker],
                         comparison_test=tests[test])


def _parse_int_list(value: str, flag: str) -> list[int]:
    try:
        items = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"{flag} expects a comma-separated list of integers") from None
    if not items:
        raise ValueError(f"{flag} expects at least one value")
    return items


def _experiment_config(args, mode) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=_parse_dataset(args),
        memory_bytes=args.memory_bytes,
        mode=mode,
        seed=args.seed,
        eval_fading=args.eval_fading,
        checkpoint_interval=args.checkpoints,
        window_size=args.window_size,
        fading_factor=args.fading_factor,
    )


def _print_run(result: RunResult) -> None:
    print(f"{result.config_id}: final_f1={result.final_f1:.6f} "
          f"trees={result.final_tree_count} additions={result.additions} "
          f"capacity={result.capacity}")


def _cmd_run(args) -> int:
    if args.dynamic is not None:
        mode = DynamicMode(_parse_dynamic(args.dynamic))
    else:
        mode = FixedMode(args.trees)
    result = run_experiment(_experiment_config(args, mode))
    if args.out:
        write_checkpoints_csv(args.out, result)
    if args.summary_out:
        write_summary_csv(args.summary_out, [result])
    _print_run(result)
    return 0


def _cmd_sweep(args) -> int:
    counts = _parse_int_list(args.counts, "--counts")
    config = _experiment_config(args, FixedMode(counts[0]))
    sweep = sweep_tree_count(config, counts)
    if args.out:
        results = []
        for count, f1 in sweep.rows:
            results.append(RunResult(f"fixed-{count}", 0, (), f1, count, 0, 0))
        write_summary_csv(args.out, results)
    for count, f1 in sweep.rows:
        print(f"fixed-{count}: final_f1={f1:.6f}")
    print(f"best: {sweep.best_count} trees (f1={sweep.best_f1:.6f})")
    return 0


def _cmd_schedule(args) -> int:
    if args.method == "add":
        strategies = {s.value: s for s in LeafStrategy}
        if args.strategy not in strategies:
            raise ValueError(f"unknown strategy {args.strategy!r}")
        mode = ScheduledAddMode(strategies[args.strategy], args.target)
    else:
        mode = ScheduledRemoveMode(args.target, start=args.start)
    result = run_experiment(_experiment_config(args, mode))
    if args.out:
        write_checkpoints_csv(args.out, result)
    if args.summary_out:
        write_summary_csv(args.summary_out, [result])
    _print_run(result)
    return 0


def _cmd_compare(args) -> int:
    memory_list = _parse_int_list(args.memory_list, "--memory-list")
    counts = _parse_int_list(args.counts, "--counts")
    if args.combinations == "all":
        combos = all_dynamic_combinations()
    else:
        combos = [_parse_dynamic(item.replace("-", ",", 2))
                  for item in args.combinations.split(";") if item.strip()]
        if not combos:
            raise ValueError("--combinations expects 'all' or a ';'-separated list")
    config = _experiment_config(args, FixedMode(1))
    compare = compare_dynamic_vs_fixed(config, memory_list, combos, counts)
    if args.out:
        write_compare_csv(args.out, compare)
    _print_compare(compare)
    return 0


def _print_compare(compare: CompareResult) -> None:
    for memory, count, f1 in compare.fixed_optima:
        print(f"fixed optimum at {memory} bytes: {count} trees (f1={f1:.6f})")
    for row in compare.rows:
        print(f"{row.combination} @ {row.memory_bytes}: f1={row.f1:.6f} "
              f"ratio={row.ratio:.6f}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", default="rbf-stable",
                        help="rbf-stable, rbf-drift, or csv:<path>")
    parser.add_argument("--memory-bytes", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=1, help="forest seed")
    parser.add_argument("--fading-factor", type=float, default=0.995,
                        help="tracker fading factor")
    parser.add_argument("--window-size", type=int, default=200,
                        help="sliding tracker window")
    parser.add_argument("--eval-fading", type=float, default=0.99,
                        help="confusion-matrix fading factor")
    parser.add_argument("--label-drift-shift", type=int, default=0,
                        help="shift labels in the second half by this amount")
    parser.add_argument("--checkpoints", type=int, default=100,
                        help="checkpoint interval in points")
    parser.add_argument("--points", type=int, default=20_000,
                        help="synthetic stream length")
    parser.add_argument("--stream-seed", type=int, default=42,
                        help="synthetic generator seed")
    parser.add_argument("--drift-speed", type=float, default=1e-4,
                        help="per-point centroid displacement for rbf-drift")
    parser.add_argument("--shuffle-seed", type=int, default=None)
    parser.add_argument("--csv-label-column", type=int, default=-1)
    parser.add_argument("--csv-header", action="store_true")
    parser.add_argument("--csv-window", type=int, default=0,
                        help="collapse raw csv rows into windows of this size")
    parser.add_argument("--out", default=None, help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamforest",
        description="Memory-bounded Mondrian forest benchmarks for data streams",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="single experiment")
    _add_common(run)
    size = run.add_mutually_exclusive_group()
    size.add_argument("--trees", type=int, default=1, help="fixed ensemble size")
    size.add_argument("--dynamic", default=None,
                      help="<add>,<tracker>,<test> enables the dynamic mode")
    run.add_argument("--summary-out", default=None)
    run.set_defaults(handler=_cmd_run)

    sweep = commands.add_parser("sweep", help="fixed-size tree-count sweep")
    _add_common(sweep)
    sweep.add_argument("--counts", default=DEFAULT_COUNTS)
    sweep.set_defaults(handler=_cmd_sweep)

    schedule = commands.add_parser("schedule", help="scheduled add/remove study")
    _add_common(schedule)
    schedule.add_argument("--method", choices=("add", "remove"), required=True)
    schedule.add_argument("--strategy", default="count",
                          help="leaf strategy for scheduled additions")
    schedule.add_argument("--target", type=int, required=True)
    schedule.add_argument("--start", type=int, default=50,
                          help="starting tree count for scheduled removal")
    schedule.add_argument("--summary-out", default=None)
    schedule.set_defaults(handler=_cmd_schedule)

    compare = commands.add_parser("compare", help="dynamic vs fixed-optimal grid")
    _add_common(compare)
    compare.add_argument("--memory-list", default="200000")
    compare.add_argument("--counts", default=DEFAULT_COUNTS)
    compare.add_argument("--combinations", default="all",
                         help="'all' or ';'-separated combos like count-fading-sum-std")
    compare.set_defaults(handler=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
