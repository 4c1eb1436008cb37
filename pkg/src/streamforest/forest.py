"""Memory-bounded Mondrian forest with a fixed or self-adjusting size.

Every training step runs test-before-train and test-after-train
predictions on the same point; the gap between the two accuracy
estimates is the overfitting signal. In dynamic mode a significant gap
triggers trimming of the existing trees followed by the addition of an
empty one, which then grows into the freed pool slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._kernels import accumulate_votes
from .pool import NodePool
from .stats import (
    DEFAULT_FADING_FACTOR,
    DEFAULT_WINDOW_SIZE,
    PairedDifferenceTracker,
    TrackerKind,
    make_tracker,
    sum_stddev_test,
    sum_variance_test,
    t_test,
    z_test,
)
from .tree import LeafStrategy, MondrianTree


class ComparisonTest(Enum):
    SUM_VAR = "sum-var"
    T_TEST = "t-test"
    Z_TEST = "z-test"
    SUM_STD = "sum-std"


@dataclass(frozen=True)
class DynamicConfig:
    """Knobs of the self-adjusting mode.

    Trackers are reset after an addition by default: once the ensemble
    changed, the accumulated pre/post evidence describes a model that no
    longer exists.
    """

    addition_strategy: LeafStrategy = LeafStrategy.COUNT
    tracker_kind: TrackerKind = TrackerKind.FADING
    comparison_test: ComparisonTest = ComparisonTest.SUM_STD
    min_samples_before_test: int = 30
    reset_trackers_on_add: bool = True


@dataclass(frozen=True)
class TrainReport:
    predicted_label: int
    pre_correct: bool
    post_correct: bool
    tree_added: bool


class MondrianForest:
    """Ensemble of Mondrian trees sharing one node pool.

    Fixed mode keeps the tree count constant. Dynamic mode starts from a
    single tree and only ever grows the ensemble.
    """

    def __init__(self, pool: NodePool, seed: int = 0, n_trees: int = 1,
                 dynamic: DynamicConfig | None = None,
                 window_size: int = DEFAULT_WINDOW_SIZE,
                 fading_factor: float = DEFAULT_FADING_FACTOR):
        if dynamic is None and n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if dynamic is not None:
            n_trees = 1
        self.pool = pool
        self.seed = seed
        self.dynamic = dynamic
        self.trees = [MondrianTree(pool, seed + index) for index in range(n_trees)]
        self.rng = np.random.default_rng(seed)
        kind = dynamic.tracker_kind if dynamic is not None else TrackerKind.FADING
        self.prequential = make_tracker(kind, window_size, fading_factor)
        self.postquential = make_tracker(kind, window_size, fading_factor)
        self.paired_diff = PairedDifferenceTracker(kind, window_size, fading_factor)
        self.additions = 0
        self._next_tree_index = n_trees
        self._votes = np.zeros(pool.label_count, dtype=np.float64)

    @property
    def tree_count(self) -> int:
        return len(self.trees)

    @property
    def total_nodes(self) -> int:
        return sum(tree.node_count for tree in self.trees)

    def predict(self, features: np.ndarray) -> int:
        """Argmax of the averaged per-tree distributions.

        Empty trees abstain; with no votes at all the default label is 0.
        Ties break toward the lowest label.
        """
        roots = np.fromiter((tree.root for tree in self.trees),
                            dtype=np.int64, count=len(self.trees))
        votes = self._votes
        votes[:] = 0.0
        pool = self.pool
        active = accumulate_votes(pool.parent, pool.left, pool.right,
                                  pool.split_dim, pool.split_value,
                                  pool.counters, roots, features, votes)
        if active == 0:
            return 0
        return int(np.argmax(votes))

    def train(self, features: np.ndarray, label: int,
              pre_prediction: int | None = None) -> TrainReport:
        """Test, train every tree, test again, then maybe grow the ensemble.

        ``pre_prediction`` lets a caller that already predicted this
        point (before any training) skip the duplicate forest pass.
        """
        if pre_prediction is None:
            pre_prediction = self.predict(features)
        pre_correct = pre_prediction == label
        self.prequential.update(pre_correct)
        for tree in self.trees:
            tree.train(features, label)
        post_correct = self.predict(features) == label
        self.postquential.update(post_correct)
        self.paired_diff.update(int(post_correct) - int(pre_correct))
        added = False
        if self.dynamic is not None:
            added = self._maybe_grow()
        return TrainReport(int(pre_prediction), pre_correct, post_correct, added)

    def _maybe_grow(self) -> bool:
        config = self.dynamic
        mu_pre, var_pre, n_pre = self.prequential.mean_var()
        mu_post, var_post, n_post = self.postquential.mean_var()
        if min(n_pre, n_post) < config.min_samples_before_test:
            return False
        test = config.comparison_test
        if test is ComparisonTest.SUM_VAR:
            fire = sum_variance_test(mu_pre, var_pre, mu_post, var_post)
        elif test is ComparisonTest.SUM_STD:
            fire = sum_stddev_test(mu_pre, var_pre, mu_post, var_post)
        elif test is ComparisonTest.T_TEST:
            fire = t_test(*self.paired_diff.mean_var())
        else:
            fire = z_test(mu_pre, n_pre, mu_post, n_post)
        if not fire:
            return False
        self.trim_trees()
        self.add_tree()
        if config.reset_trackers_on_add:
            self.prequential.reset()
            self.postquential.reset()
            self.paired_diff.reset()
        return True

    def trim_trees(self, strategy: LeafStrategy | None = None) -> int:
        """Shrink every tree to an equal share that leaves room for one more.

        The budget is floor(capacity / (trees + 1)) nodes; trees already
        inside it are untouched and no tree goes below a single node.
        Returns the number of slots freed.
        """
        if strategy is None:
            strategy = (self.dynamic.addition_strategy if self.dynamic is not None
                        else LeafStrategy.COUNT)
        budget = self.pool.capacity // (len(self.trees) + 1)
        freed = 0
        for tree in self.trees:
            while tree.node_count > budget and tree.node_count >= 3:
                leaf = tree.select_leaf(strategy, self.rng)
                tree.remove_leaf(leaf)
                freed += 2
        return freed

    def add_tree(self) -> None:
        """Append an empty tree; it claims its root on its first point.

        Per-tree seeds derive from the forest seed plus a monotone tree
        index, which equals the tree count whenever trees are never
        removed (the dynamic regime).
        """
        self.trees.append(MondrianTree(self.pool, self.seed + self._next_tree_index))
        self._next_tree_index += 1
        self.additions += 1

    def remove_tree(self) -> None:
        """Delete a uniformly chosen tree and return its nodes to the pool."""
        if len(self.trees) < 2:
            raise ValueError("cannot remove a tree from a forest of fewer than 2")
        index = int(self.rng.integers(len(self.trees)))
        tree = self.trees.pop(index)
        refs = tree.node_refs()
        if refs:
            self.pool.release(refs)

    def __repr__(self) -> str:
        mode = "dynamic" if self.dynamic is not None else "fixed"
        return (f"MondrianForest(mode={mode}, trees={len(self.trees)}, "
                f"nodes={self.total_nodes}/{self.pool.capacity})")
