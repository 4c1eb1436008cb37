"""Shared structural checkers used across the test modules."""

import numpy as np

from streamforest.pool import NO_NODE


def check_tree(tree):
    """Assert every structural invariant of one tree.

    Full binary shape, consistent parent links, box nesting, split-side
    consistency of child boxes, and ancestor counters dominating the sum
    of their children (equality is lost only through trimming).
    """
    pool = tree.pool
    if tree.root == NO_NODE:
        assert tree.node_count == 0
        return
    assert pool.parent[tree.root] == NO_NODE
    seen = set()
    for slot, _depth in tree.iter_nodes():
        assert slot not in seen, "cycle or shared slot"
        seen.add(slot)
        assert pool.allocated[slot], "tree reaches a released slot"
        left = int(pool.left[slot])
        right = int(pool.right[slot])
        assert (left == NO_NODE) == (right == NO_NODE), "node with one child"
        assert np.all(pool.lower[slot] <= pool.upper[slot])
        if left != NO_NODE:
            dim = int(pool.split_dim[slot])
            value = pool.split_value[slot]
            for child in (left, right):
                assert int(pool.parent[child]) == slot
                assert np.all(pool.lower[slot] <= pool.lower[child])
                assert np.all(pool.upper[child] <= pool.upper[slot])
            assert pool.upper[left, dim] <= value
            assert pool.lower[right, dim] >= value
            assert np.all(
                pool.counters[slot] >= pool.counters[left] + pool.counters[right]
            )
            assert pool.split_time[slot] < pool.split_time[left]
            assert pool.split_time[slot] < pool.split_time[right]
    assert len(seen) == tree.node_count


def check_forest(forest):
    """Pool conservation: tree nodes partition exactly the used slots."""
    pool = forest.pool
    assert pool.used <= pool.capacity
    all_refs = []
    for tree in forest.trees:
        check_tree(tree)
        all_refs.extend(tree.node_refs())
    assert len(all_refs) == len(set(all_refs)), "trees share slots"
    assert len(all_refs) == pool.used
    assert int(pool.allocated.sum()) == pool.used
