"""Experiment harness: single runs, tree-count sweeps, scheduled
add/remove studies, and the dynamic-versus-fixed comparison grid.

Every run streams each point exactly once, scoring the test-then-train
prediction in a fading confusion matrix before the forest trains on the
point. Results are plain dataclasses plus CSV writers.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, replace
from typing import Sequence, Union

from .forest import ComparisonTest, DynamicConfig, MondrianForest
from .pool import NodePool
from .stats import (
    DEFAULT_EVAL_FADING,
    DEFAULT_FADING_FACTOR,
    DEFAULT_WINDOW_SIZE,
    FadingConfusionMatrix,
    TrackerKind,
)
from .stream import (
    DataPoint,
    RbfGeneratorConfig,
    StreamSpec,
    csv_load,
    inject_label_drift,
    rbf_generate,
    shuffle,
    window_features,
)
from .tree import LeafStrategy

# Canonical synthetic benchmark stream. 200 centroids keep the task hard
# enough at desk-scale memory budgets that the underfit/overfit tradeoff
# is visible; 50 centroids in 12 dimensions are trivially separable.
RBF_FEATURES = 12
RBF_LABELS = 33
RBF_CENTROIDS = 200
RBF_POINTS = 20_000
RBF_STREAM_SEED = 42
DEFAULT_DRIFT_SPEED = 1e-4


@dataclass(frozen=True)
class DatasetConfig:
    """Where the stream comes from and how it is preprocessed.

    ``source`` is one of "rbf-stable", "rbf-drift", or "csv". Windowing
    applies to CSV sensor data only; shuffling happens before label
    drift is injected.
    """

    source: str = "rbf-stable"
    path: str | None = None
    n_points: int = RBF_POINTS
    feature_count: int = RBF_FEATURES
    label_count: int = RBF_LABELS
    centroid_count: int = RBF_CENTROIDS
    drift_speed: float = DEFAULT_DRIFT_SPEED
    stream_seed: int = RBF_STREAM_SEED
    label_drift_shift: int = 0
    label_column: int = -1
    has_header: bool = False
    window_size: int = 0
    shuffle_seed: int | None = None


@dataclass(frozen=True)
class FixedMode:
    tree_count: int


@dataclass(frozen=True)
class DynamicMode:
    config: DynamicConfig = DynamicConfig()


@dataclass(frozen=True)
class ScheduledAddMode:
    strategy: LeafStrategy
    target: int


@dataclass(frozen=True)
class ScheduledRemoveMode:
    target: int
    start: int = 50


Mode = Union[FixedMode, DynamicMode, ScheduledAddMode, ScheduledRemoveMode]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetConfig
    memory_bytes: int
    mode: Mode
    seed: int = 1
    eval_fading: float = DEFAULT_EVAL_FADING
    checkpoint_interval: int = 100
    window_size: int = DEFAULT_WINDOW_SIZE
    fading_factor: float = DEFAULT_FADING_FACTOR


@dataclass(frozen=True)
class CheckpointRow:
    point_index: int
    f1_fading: float
    tree_count: int
    pool_used: int
    max_depth: int


@dataclass(frozen=True)
class RunResult:
    config_id: str
    capacity: int
    checkpoints: tuple[CheckpointRow, ...]
    final_f1: float
    final_tree_count: int
    additions: int
    removals: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[tuple[int, float], ...]
    best_count: int
    best_f1: float


@dataclass(frozen=True)
class CompareRow:
    combination: str
    memory_bytes: int
    f1: float
    fixed_optimal_f1: float
    ratio: float


@dataclass(frozen=True)
class CompareResult:
    rows: tuple[CompareRow, ...]
    fixed_optima: tuple[tuple[int, int, float], ...]  # (memory, count, f1)


def config_id(config: ExperimentConfig) -> str:
    mode = config.mode
    if isinstance(mode, FixedMode):
        return f"fixed-{mode.tree_count}"
    if isinstance(mode, DynamicMode):
        return f"dynamic-{combination_id(mode.config)}"
    if isinstance(mode, ScheduledAddMode):
        return f"sched-add-{mode.strategy.value}-{mode.target}"
    return f"sched-remove-{mode.target}"


def combination_id(config: DynamicConfig) -> str:
    return (f"{config.addition_strategy.value}-{config.tracker_kind.value}"
            f"-{config.comparison_test.value}")


def all_dynamic_combinations() -> list[DynamicConfig]:
    """The full strategy x tracker x test grid, in a stable order."""
    return [
        DynamicConfig(addition_strategy=strategy, tracker_kind=kind,
                      comparison_test=test)
        for strategy, kind, test in itertools.product(
            LeafStrategy, TrackerKind, ComparisonTest)
    ]


def materialize(dataset: DatasetConfig) -> tuple[list[DataPoint], StreamSpec]:
    """Build the full point list for a dataset description."""
    if dataset.source == "csv":
        if dataset.path is None:
            raise ValueError("csv dataset needs a path")
        points, spec = csv_load(dataset.path, dataset.label_column, dataset.has_header)
        if dataset.window_size > 0:
            points = window_features(points, dataset.window_size)
            if not points:
                raise ValueError("windowing left no complete window")
            spec = StreamSpec(points[0].features.shape[0], spec.label_count, len(points))
    elif dataset.source in ("rbf-stable", "rbf-drift"):
        drift = dataset.drift_speed if dataset.source == "rbf-drift" else 0.0
        generator = RbfGeneratorConfig(
            centroid_count=dataset.centroid_count,
            feature_count=dataset.feature_count,
            label_count=dataset.label_count,
            drift_speed=drift,
            seed=dataset.stream_seed,
        )
        points = rbf_generate(generator, dataset.n_points)
        spec = StreamSpec(dataset.feature_count, dataset.label_count, len(points))
    else:
        raise ValueError(f"unknown dataset source {dataset.source!r}")
    if dataset.shuffle_seed is not None:
        points = shuffle(points, dataset.shuffle_seed)
    if dataset.label_drift_shift:
        points = inject_label_drift(points, spec.label_count, dataset.label_drift_shift)
    return points, spec


def structural_schedule(length: int, changes: int) -> tuple[int, ...]:
    """Evenly spaced 0-based indices at which a scheduled change fires.

    ``changes`` additions (or removals) split the stream into
    ``changes + 1`` equal segments, so a 20,000-point stream with 9
    changes fires at 2000, 4000, ..., 18000.
    """
    if changes <= 0:
        return ()
    interval = length // (changes + 1)
    if interval == 0:
        raise ValueError(f"stream of {length} points cannot host {changes} scheduled changes")
    return tuple(interval * step for step in range(1, changes + 1))


def _build_forest(config: ExperimentConfig, spec: StreamSpec,
                  length: int) -> tuple[MondrianForest, dict[int, str]]:
    pool = NodePool.from_memory(config.memory_bytes, spec.feature_count,
                                spec.label_count)
    mode = config.mode
    schedule: dict[int, str] = {}
    if isinstance(mode, FixedMode):
        forest = MondrianForest(pool, seed=config.seed, n_trees=mode.tree_count,
                                window_size=config.window_size,
                                fading_factor=config.fading_factor)
    elif isinstance(mode, DynamicMode):
        forest = MondrianForest(pool, seed=config.seed, dynamic=mode.config,
                                window_size=config.window_size,
                                fading_factor=config.fading_factor)
    elif isinstance(mode, ScheduledAddMode):
        if mode.target < 1:
            raise ValueError("target tree count must be >= 1")
        forest = MondrianForest(pool, seed=config.seed, n_trees=1,
                                window_size=config.window_size,
                                fading_factor=config.fading_factor)
        for index in structural_schedule(length, mode.target - 1):
            schedule[index] = "add"
    elif isinstance(mode, ScheduledRemoveMode):
        if not 1 <= mode.target <= mode.start:
            raise ValueError("need 1 <= target <= start")
        forest = MondrianForest(pool, seed=config.seed, n_trees=mode.start,
                                window_size=config.window_size,
                                fading_factor=config.fading_factor)
        for index in structural_schedule(length, mode.start - mode.target):
            schedule[index] = "remove"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return forest, schedule


def _execute(config: ExperimentConfig, points: Sequence[DataPoint],
             spec: StreamSpec) -> RunResult:
    if not points:
        raise ValueError("empty stream")
    if config.checkpoint_interval < 1:
        raise ValueError("checkpoint_interval must be >= 1")
    forest, schedule = _build_forest(config, spec, len(points))
    mode = config.mode
    scheduled_strategy = mode.strategy if isinstance(mode, ScheduledAddMode) else None
    matrix = FadingConfusionMatrix(spec.label_count, config.eval_fading)
    removals = 0
    checkpoints: list[CheckpointRow] = []
    pool = forest.pool
    interval = config.checkpoint_interval
    for index, point in enumerate(points):
        action = schedule.get(index)
        if action == "add":
            forest.trim_trees(scheduled_strategy)
            forest.add_tree()
        elif action == "remove":
            forest.remove_tree()
            removals += 1
        prediction = forest.predict(point.features)
        matrix.update(point.label, prediction)
        forest.train(point.features, point.label, pre_prediction=prediction)
        if (index + 1) % interval == 0:
            max_depth = max((tree.depth_stats()[1] for tree in forest.trees),
                            default=0)
            checkpoints.append(CheckpointRow(index + 1, matrix.macro_f1(),
                                             len(forest.trees), pool.used,
                                             max_depth))
    return RunResult(
        config_id=config_id(config),
        capacity=pool.capacity,
        checkpoints=tuple(checkpoints),
        final_f1=matrix.macro_f1(),
        final_tree_count=len(forest.trees),
        additions=forest.additions,
        removals=removals,
    )


def run_experiment(config: ExperimentConfig) -> RunResult:
    points, spec = materialize(config.dataset)
    return _execute(config, points, spec)


def run_scheduled(config: ExperimentConfig) -> RunResult:
    if not isinstance(config.mode, (ScheduledAddMode, ScheduledRemoveMode)):
        raise ValueError("run_scheduled needs a scheduled add or remove mode")
    return run_experiment(config)


def sweep_tree_count(config: ExperimentConfig,
                     counts: Sequence[int]) -> SweepResult:
    """Run the fixed-size forest for each count over one shared stream."""
    if not isinstance(config.mode, FixedMode):
        raise ValueError("sweep needs a FixedMode base config")
    if not counts:
        raise ValueError("counts must be non-empty")
    points, spec = materialize(config.dataset)
    return _sweep_on_points(config, counts, points, spec)


def _sweep_on_points(config, counts, points, spec) -> SweepResult:
    rows = []
    for count in counts:
        result = _execute(replace(config, mode=FixedMode(count)), points, spec)
        rows.append((int(count), result.final_f1))
    best_count, best_f1 = max(rows, key=lambda row: (row[1], -row[0]))
    return SweepResult(tuple(rows), best_count, best_f1)


def compare_dynamic_vs_fixed(config: ExperimentConfig,
                             memory_bytes_list: Sequence[int],
                             combinations: Sequence[DynamicConfig],
                             counts: Sequence[int]) -> CompareResult:
    """Score dynamic combinations against the best fixed size per memory limit.

    For each memory budget the fixed optimum is the argmax over
    ``counts``; each dynamic run reports its final F1 as a fraction of
    that optimum.
    """
    if not memory_bytes_list or not combinations or not counts:
        raise ValueError("memory list, combinations, and counts must be non-empty")
    points, spec = materialize(config.dataset)
    rows: list[CompareRow] = []
    optima: list[tuple[int, int, float]] = []
    for memory in memory_bytes_list:
        base = replace(config, memory_bytes=memory)
        sweep = _sweep_on_points(replace(base, mode=FixedMode(1)), counts,
                                 points, spec)
        optima.append((memory, sweep.best_count, sweep.best_f1))
        for combo in combinations:
            result = _execute(replace(base, mode=DynamicMode(combo)), points, spec)
            ratio = result.final_f1 / sweep.best_f1 if sweep.best_f1 > 0 else float("inf")
            rows.append(CompareRow(combination_id(combo), memory,
                                   result.final_f1, sweep.best_f1, ratio))
    return CompareResult(tuple(rows), tuple(optima))


def write_checkpoints_csv(path, result: RunResult) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["point_index", "f1_fading", "tree_count", "pool_used",
                         "max_depth"])
        for row in result.checkpoints:
            writer.writerow([row.point_index, f"{row.f1_fading:.6f}",
                             row.tree_count, row.pool_used, row.max_depth])


def write_summary_csv(path, results: Sequence[RunResult]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["config_id", "final_f1", "tree_count_final", "additions"])
        for result in results:
            writer.writerow([result.config_id, f"{result.final_f1:.6f}",
                             result.final_tree_count, result.additions])


def write_compare_csv(path, compare: CompareResult) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["config_id", "memory_bytes", "final_f1",
                         "fixed_optimal_f1", "ratio"])
        for row in compare.rows:
            writer.writerow([row.combination, row.memory_bytes, f"{row.f1:.6f}",
                             f"{row.fixed_optimal_f1:.6f}", f"{row.ratio:.6f}"])
