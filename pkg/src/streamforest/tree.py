"""Single Mondrian tree backed by the shared node pool.

A tree is a root slot plus bookkeeping. Training never moves existing
points: a split inserts a new parent and a sibling leaf above the node
where the point escaped the box, and the displaced subtree is left
untouched. When the pool runs dry the tree pauses, meaning boxes still
widen and counters still grow but no node is ever added.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterator

import numpy as np

from ._kernels import leaf_for, train_point
from .pool import NO_NODE, NodePool


class LeafStrategy(Enum):
    """How trimming picks the next leaf to drop."""

    RANDOM = "random"
    DEPTH = "depth"
    COUNT = "count"


class MondrianTree:
    def __init__(self, pool: NodePool, seed: int):
        self.pool = pool
        self.root = NO_NODE
        self.node_count = 0
        self.paused = False
        self._rng_state = np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)

    @property
    def is_empty(self) -> bool:
        return self.root == NO_NODE

    def train(self, features: np.ndarray, label: int) -> bool:
        """Absorb one labeled point; return True when the tree gained nodes.

        An empty tree tries to allocate its root leaf first; if the pool
        cannot supply it the point is counted nowhere. Pool exhaustion
        during a descent is the documented pause behavior, not an error.
        """
        pool = self.pool
        if self.root == NO_NODE:
            slot = pool.allocate_root()
            if slot is None:
                self.paused = True
                return False
            pool.lower[slot, :] = features
            pool.upper[slot, :] = features
            pool.counters[slot, label] = 1
            pool.split_time[slot] = np.inf
            self.root = slot
            self.node_count = 1
            self.paused = False
            return True
        grew, new_root, denied = train_point(
            pool.parent, pool.left, pool.right, pool.split_dim,
            pool.split_value, pool.split_time, pool.lower, pool.upper,
            pool.counters, pool.allocated, pool.free_stack, pool.state,
            self.root, features, label, self._rng_state,
        )
        if grew:
            self.root = int(new_root)
            self.node_count += 2
            self.paused = False
        elif denied:
            self.paused = True
        return bool(grew)

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Label distribution at the leaf the point routes to.

        Routing uses split comparisons only. A leaf drained to zero
        counters defers to the nearest ancestor with mass.
        """
        if self.root == NO_NODE:
            raise ValueError("empty tree has no prediction")
        pool = self.pool
        node = int(leaf_for(pool.left, pool.right, pool.split_dim,
                            pool.split_value, self.root, features))
        while node != NO_NODE:
            row = pool.counters[node]
            total = int(row.sum())
            if total > 0:
                return row / total
            node = int(pool.parent[node])
        return np.full(pool.label_count, 1.0 / pool.label_count)

    def iter_nodes(self) -> Iterator[tuple[int, int]]:
        """Yield (slot, depth) for every reachable node."""
        if self.root == NO_NODE:
            return
        pool = self.pool
        stack = [(self.root, 0)]
        while stack:
            slot, depth = stack.pop()
            yield slot, depth
            child = int(pool.left[slot])
            if child != NO_NODE:
                stack.append((int(pool.right[slot]), depth + 1))
                stack.append((child, depth + 1))

    def node_refs(self) -> list[int]:
        return [slot for slot, _ in self.iter_nodes()]

    def depth_stats(self) -> tuple[int, int]:
        """(leaf count, max depth); (0, 0) for an empty tree."""
        leaf_count = 0
        max_depth = 0
        pool = self.pool
        for slot, depth in self.iter_nodes():
            if depth > max_depth:
                max_depth = depth
            if pool.left[slot] == NO_NODE:
                leaf_count += 1
        return leaf_count, max_depth

    def select_leaf(self, strategy: LeafStrategy, rng: np.random.Generator) -> int:
        """Pick a leaf to trim. Ties break toward the lowest slot index."""
        if self.node_count < 3:
            raise ValueError("leaf selection needs a tree with at least 3 nodes")
        pool = self.pool
        leaves = [(slot, depth) for slot, depth in self.iter_nodes()
                  if pool.left[slot] == NO_NODE]
        if strategy is LeafStrategy.RANDOM:
            slots = sorted(slot for slot, _ in leaves)
            return slots[int(rng.integers(len(slots)))]
        if strategy is LeafStrategy.DEPTH:
            return min(leaves, key=lambda item: (-item[1], item[0]))[0]
        totals = ((slot, int(pool.counters[slot].sum())) for slot, _ in leaves)
        return min(totals, key=lambda item: (item[1], item[0]))[0]

    def remove_leaf(self, leaf: int) -> None:
        """Drop a non-root leaf and its parent, promoting the sibling.

        The sibling inherits the parent's box so the trimmed region stays
        covered; its counters are untouched because the ancestors still
        summarize the removed mass.
        """
        pool = self.pool
        leaf = int(leaf)
        if self.node_count < 3:
            raise ValueError("cannot trim a tree with fewer than 3 nodes")
        if leaf == self.root or not (0 <= leaf < pool.capacity):
            raise ValueError("leaf to remove must be a non-root node")
        if pool.left[leaf] != NO_NODE:
            raise ValueError(f"slot {leaf} is not a leaf")
        if not self._contains(leaf):
            raise ValueError(f"slot {leaf} does not belong to this tree")
        parent_slot = int(pool.parent[leaf])
        if int(pool.left[parent_slot]) == leaf:
            sibling = int(pool.right[parent_slot])
        else:
            sibling = int(pool.left[parent_slot])
        grandparent = int(pool.parent[parent_slot])
        pool.parent[sibling] = grandparent
        if grandparent == NO_NODE:
            self.root = sibling
        elif int(pool.left[grandparent]) == parent_slot:
            pool.left[grandparent] = sibling
        else:
            pool.right[grandparent] = sibling
        pool.lower[sibling, :] = pool.lower[parent_slot]
        pool.upper[sibling, :] = pool.upper[parent_slot]
        pool.release((parent_slot, leaf))
        self.node_count -= 2

    def _contains(self, slot: int) -> bool:
        node = slot
        pool = self.pool
        while True:
            up = int(pool.parent[node])
            if up == NO_NODE:
                return node == self.root
            node = up

    def __repr__(self) -> str:
        return f"MondrianTree(nodes={self.node_count}, paused={self.paused})"
