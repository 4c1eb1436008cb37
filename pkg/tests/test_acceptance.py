"""End-to-end acceptance suite.

Each test prints one pass/fail line. The benchmark criteria (1 to 4) run
the full 20,000-point synthetic stream and take a few minutes combined;
the remaining criteria are oracle and invariant checks.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import check_forest
from streamforest.bench import (
    DatasetConfig,
    DynamicMode,
    ExperimentConfig,
    FixedMode,
    all_dynamic_combinations,
    combination_id,
    run_experiment,
    sweep_tree_count,
)
from streamforest.cli import main as cli_main
from streamforest.forest import ComparisonTest, DynamicConfig, MondrianForest
from streamforest.pool import NodePool, node_footprint
from streamforest.stats import (
    T_TEST_CRITICAL,
    Z_TEST_CRITICAL,
    FadingConfusionMatrix,
    FadingTracker,
    PairedDifferenceTracker,
    TrackerKind,
    describe_tests,
    sum_stddev_test,
    sum_variance_test,
    t_test,
    z_test,
)
from streamforest.tree import LeafStrategy

SWEEP_COUNTS = (1, 2, 3, 5, 8, 10, 15, 20, 30, 50)
SEEDS = (1, 2, 3)
STABLE = DatasetConfig()  # canonical 20,000-point synthetic stream
DRIFTED = replace(STABLE, label_drift_shift=1)
TOP_COMBINATION = DynamicConfig(addition_strategy=LeafStrategy.COUNT,
                                tracker_kind=TrackerKind.FADING,
                                comparison_test=ComparisonTest.SUM_STD)


@pytest.fixture
def report(capsys):
    """One pass/fail line per criterion, straight to the terminal."""

    def _report(number: int, name: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        with capsys.disabled():
            print(f"[ACCEPTANCE {number}] {name}: {status}  {detail}", flush=True)
        assert ok, f"criterion {number} ({name}) failed: {detail}"

    return _report


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # let numba compile outside any timed region
    run_experiment(ExperimentConfig(
        dataset=DatasetConfig(n_points=50, feature_count=2, label_count=3,
                              centroid_count=4),
        memory_bytes=10_000, mode=DynamicMode(DynamicConfig()), seed=0))


def test_criterion_1_memory_bound_and_runtime(report):
    config = ExperimentConfig(dataset=STABLE, memory_bytes=200_000,
                              mode=DynamicMode(TOP_COMBINATION), seed=1)
    start = time.perf_counter()
    result = run_experiment(config)
    elapsed = time.perf_counter() - start
    capacity_ok = result.capacity == 561
    bound_ok = all(row.pool_used <= result.capacity for row in result.checkpoints)
    time_ok = elapsed < 10.0
    report(1, "memory bound invariant", capacity_ok and bound_ok and time_ok,
            f"capacity={result.capacity} max_used="
            f"{max(row.pool_used for row in result.checkpoints)} "
            f"runtime={elapsed:.2f}s")


def test_criterion_2_optimal_size_exists(report):
    curves = []
    for seed in SEEDS:
        config = ExperimentConfig(dataset=STABLE, memory_bytes=200_000,
                                  mode=FixedMode(1), seed=seed)
        sweep = sweep_tree_count(config, SWEEP_COUNTS)
        curves.append([f1 for _, f1 in sweep.rows])
    averaged = np.mean(curves, axis=0)
    best_index = int(np.argmax(averaged))
    best_count = SWEEP_COUNTS[best_index]
    interior = 1 < best_count < 50
    margin = float(averaged[best_index]) / float(averaged[-1])
    margin_ok = float(averaged[best_index]) >= 1.02 * float(averaged[-1])
    report(2, "optimal ensemble size", interior and margin_ok,
            f"argmax={best_count} best_f1={averaged[best_index]:.4f} "
            f"f1_at_50={averaged[-1]:.4f} margin={margin:.3f}")


def test_criterion_3_dynamic_near_fixed_optimum(report):
    details = []
    ok = True
    for seed in SEEDS:
        base = ExperimentConfig(dataset=STABLE, memory_bytes=600_000,
                                mode=FixedMode(1), seed=seed)
        sweep = sweep_tree_count(base, SWEEP_COUNTS)
        dynamic = run_experiment(replace(base, mode=DynamicMode(TOP_COMBINATION)))
        ratio = dynamic.final_f1 / sweep.best_f1
        ok = ok and ratio >= 0.90
        details.append(f"seed{seed}:{ratio:.3f}")
    report(3, "dynamic reaches 90% of fixed optimum", ok, " ".join(details))


def test_criterion_4_drift_benefit(report):
    base = ExperimentConfig(dataset=DRIFTED, memory_bytes=600_000,
                            mode=FixedMode(1), seed=1)
    sweep = sweep_tree_count(base, SWEEP_COUNTS)
    winners = []
    best_ratio = 0.0
    for combo in all_dynamic_combinations():
        result = run_experiment(replace(base, mode=DynamicMode(combo)))
        ratio = result.final_f1 / sweep.best_f1
        best_ratio = max(best_ratio, ratio)
        if ratio >= 1.0:
            winners.append(combination_id(combo))
    report(4, "drift benefit of dynamic forests", len(winners) >= 1,
            f"fixed_opt={sweep.best_f1:.4f} best_ratio={best_ratio:.3f} "
            f"winners={winners}")


def test_criterion_5_statistics_oracles(report):
    rng = np.random.default_rng(2024)
    factors = (0.9, 0.99, 0.995, 1.0)
    worst = 0.0

    for index in range(500):  # binary accuracy tracker against weighted sums
        factor = factors[index % len(factors)]
        length = int(rng.integers(1, 10_001))
        values = rng.integers(0, 2, size=length)
        tracker = FadingTracker(factor)
        for value in values:
            tracker.update(int(value))
        weights = factor ** np.arange(length - 1, -1, -1, dtype=np.float64)
        count_oracle = float(weights.sum())
        correct_oracle = float((weights * values).sum())
        worst = max(worst, abs(tracker.faded_count - count_oracle),
                    abs(tracker.faded_correct - correct_oracle))

    for index in range(500):  # paired difference tracker, same oracle style
        factor = factors[index % len(factors)]
        length = int(rng.integers(1, 10_001))
        diffs = rng.integers(-1, 2, size=length)
        tracker = PairedDifferenceTracker(TrackerKind.FADING, fading_factor=factor)
        for diff in diffs:
            tracker.update(int(diff))
        weights = factor ** np.arange(length - 1, -1, -1, dtype=np.float64)
        n_oracle = float(weights.sum())
        mu_oracle = float((weights * diffs).sum()) / n_oracle
        var_oracle = max(float((weights * diffs ** 2).sum()) / n_oracle
                         - mu_oracle ** 2, 0.0)
        mu, var, n_eff = tracker.mean_var()
        worst = max(worst, abs(n_eff - n_oracle), abs(mu - mu_oracle),
                    abs(var - var_oracle))
    trackers_ok = worst <= 1e-9

    thresholds_ok = T_TEST_CRITICAL == 2.326 and Z_TEST_CRITICAL == 2.576
    worst_stat = 0.0
    decisions_ok = True
    for _ in range(1000):  # the four comparison rules against transcription
        mu_pre, mu_post = (float(v) for v in rng.uniform(size=2))
        var_pre, var_post = (float(v) for v in rng.uniform(0.0, 0.25, size=2))
        mu_d = float(rng.uniform(-1.0, 1.0))
        var_d = float(rng.uniform(0.0, 1.0))
        n = float(rng.integers(1, 1000))

        decisions_ok &= (sum_variance_test(mu_pre, var_pre, mu_post, var_post)
                         == ((mu_post - mu_pre) > math.sqrt(var_post + var_pre)))
        decisions_ok &= (sum_stddev_test(mu_pre, var_pre, mu_post, var_post)
                         == ((mu_post - mu_pre)
                             > math.sqrt(var_post) + math.sqrt(var_pre)))
        decisions_ok &= (t_test(mu_d, var_d, n)
                         == (math.sqrt(n) * mu_d / math.sqrt(var_d) > 2.326))
        pooled = (mu_pre + mu_post) / 2.0
        std_error = math.sqrt(2.0 * pooled * (1.0 - pooled) / n)
        expected_z = (mu_post - mu_pre) / std_error if std_error > 0 else 0.0
        decisions_ok &= (z_test(mu_pre, n, mu_post, n)
                         == (std_error > 0 and expected_z > 2.576))

        stats = describe_tests((mu_pre, var_pre, n), (mu_post, var_post, n),
                               (mu_d, var_d, n))
        worst_stat = max(worst_stat,
                         abs(stats.z_score - expected_z) if std_error > 0 else 0.0,
                         abs(stats.t_statistic
                             - math.sqrt(n) * mu_d / math.sqrt(var_d)))
    stats_ok = worst_stat <= 1e-12
    report(5, "statistics oracles",
            trackers_ok and thresholds_ok and decisions_ok and stats_ok,
            f"tracker_err={worst:.2e} stat_err={worst_stat:.2e}")


def _batch_macro_f1(pairs, label_count):
    counts = [[0] * label_count for _ in range(label_count)]
    for true_label, predicted in pairs:
        counts[true_label][predicted] += 1
    scores = []
    for label in range(label_count):
        tp = counts[label][label]
        fn = sum(counts[label][k] for k in range(label_count)) - tp
        fp = sum(counts[k][label] for k in range(label_count)) - tp
        if tp + fn + fp == 0:
            continue  # label never appeared
        denominator = 2 * tp + fp + fn
        scores.append(2 * tp / denominator if denominator > 0 else 0.0)
    return sum(scores) / len(scores)


def test_criterion_6_fading_f1_degeneracy(report):
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        label_count = int(rng.integers(2, 11))
        length = int(rng.integers(1, 5_001))
        pairs = [(int(rng.integers(label_count)), int(rng.integers(label_count)))
                 for _ in range(length)]
        matrix = FadingConfusionMatrix(label_count, fading_factor=1.0)
        for true_label, predicted in pairs:
            matrix.update(true_label, predicted)
        worst = max(worst, abs(matrix.macro_f1()
                               - _batch_macro_f1(pairs, label_count)))
    report(6, "fading F1 degenerates to batch macro F1", worst <= 1e-9,
            f"max_abs_err={worst:.2e}")


def test_criterion_7_noop_stability(report):
    rng = np.random.default_rng(5)
    points = [(rng.uniform(size=12), int(rng.integers(33))) for _ in range(10_000)]
    ok = True
    details = []
    for test in ComparisonTest:
        pool = NodePool.from_memory(node_footprint(12, 33), 12, 33)
        assert pool.capacity == 1  # one slot cannot host even a root pair
        forest = MondrianForest(pool, seed=1,
                                dynamic=DynamicConfig(comparison_test=test))
        identical = True
        for features, label in points:
            outcome = forest.train(features, label)
            identical &= outcome.pre_correct == outcome.post_correct
        ok &= identical and forest.additions == 0 and forest.tree_count == 1
        details.append(f"{test.value}:adds={forest.additions}")
    report(7, "no-op stability under a starved pool", ok, " ".join(details))


def test_criterion_8_structural_properties(report):
    rng = np.random.default_rng(77)
    operations = 0
    scenarios = 0
    while operations < 10_000:
        scenarios += 1
        pool = NodePool(capacity=41, feature_count=2, label_count=3)
        forest = MondrianForest(pool, seed=int(rng.integers(1_000_000)), n_trees=2)
        for _ in range(400):
            operations += 1
            roll = rng.uniform()
            if roll < 0.7:
                before = [tree.node_count for tree in forest.trees]
                forest.train(rng.uniform(size=2), int(rng.integers(3)))
                for previous, tree in zip(before, forest.trees):
                    delta = tree.node_count - previous
                    if previous == 0:
                        assert delta in (0, 1)  # a root may or may not fit
                    else:
                        assert delta in (0, 2)
            elif roll < 0.8:
                freed = forest.trim_trees(LeafStrategy(
                    ("random", "depth", "count")[int(rng.integers(3))]))
                assert freed % 2 == 0
                budget = pool.capacity // (forest.tree_count + 1)
                for tree in forest.trees:
                    assert tree.node_count <= max(budget, 1)
            elif roll < 0.9:
                forest.add_tree()
                assert forest.trees[-1].is_empty
            elif forest.tree_count >= 2:
                used_before = pool.used
                sizes = sorted(tree.node_count for tree in forest.trees)
                forest.remove_tree()
                assert used_before - pool.used in sizes
            check_forest(forest)  # shape, nesting, pool conservation
    report(8, "structural properties over randomized operations", True,
            f"operations={operations} scenarios={scenarios}")


def test_criterion_9_cli_determinism(tmp_path, report):
    commands = [
        ["run", "--points", "2000", "--memory-bytes", "100000",
         "--dynamic", "count,fading,sum-std", "--seed", "7"],
        ["sweep", "--points", "1000", "--memory-bytes", "50000",
         "--counts", "1,3", "--seed", "2"],
    ]
    ok = True
    for index, command in enumerate(commands):
        payloads = []
        for attempt in ("a", "b"):
            out = tmp_path / f"{index}-{attempt}.csv"
            code = cli_main(command + ["--out", str(out)])
            assert code == 0
            payloads.append(out.read_bytes())
        ok &= payloads[0] == payloads[1] and len(payloads[0]) > 0
    report(9, "CLI output determinism", ok,
            f"checked {len(commands)} invocations")
