"""Memory-bounded Mondrian forest classification for data streams."""

from .bench import (
    CompareResult,
    DatasetConfig,
    DynamicMode,
    ExperimentConfig,
    FixedMode,
    RunResult,
    ScheduledAddMode,
    ScheduledRemoveMode,
    SweepResult,
    all_dynamic_combinations,
    compare_dynamic_vs_fixed,
    run_experiment,
    run_scheduled,
    sweep_tree_count,
)
from .forest import ComparisonTest, DynamicConfig, MondrianForest, TrainReport
from .pool import NO_NODE, NodePool, PoolError, node_footprint
from .stats import (
    FadingConfusionMatrix,
    FadingTracker,
    PairedDifferenceTracker,
    SlidingTracker,
    TrackerKind,
    sum_stddev_test,
    sum_variance_test,
    t_test,
    z_test,
)
from .stream import (
    DataPoint,
    RbfGeneratorConfig,
    RbfStream,
    StreamFormatError,
    StreamSpec,
    csv_load,
    inject_label_drift,
    rbf_generate,
    shuffle,
    window_features,
)
from .tree import LeafStrategy, MondrianTree

__version__ = "0.1.0"

__all__ = [
    "CompareResult",
    "ComparisonTest",
    "DataPoint",
    "DatasetConfig",
    "DynamicConfig",
    "DynamicMode",
    "ExperimentConfig",
    "FadingConfusionMatrix",
    "FadingTracker",
    "FixedMode",
    "LeafStrategy",
    "MondrianForest",
    "MondrianTree",
    "NO_NODE",
    "NodePool",
    "PairedDifferenceTracker",
    "PoolError",
    "RbfGeneratorConfig",
    "RbfStream",
    "RunResult",
    "ScheduledAddMode",
    "ScheduledRemoveMode",
    "SlidingTracker",
    "StreamFormatError",
    "StreamSpec",
    "SweepResult",
    "TrackerKind",
    "TrainReport",
    "all_dynamic_combinations",
    "compare_dynamic_vs_fixed",
    "csv_load",
    "inject_label_drift",
    "node_footprint",
    "rbf_generate",
    "run_experiment",
    "run_scheduled",
    "shuffle",
    "sum_stddev_test",
    "sum_variance_test",
    "sweep_tree_count",
    "t_test",
    "window_features",
    "z_test",
]
