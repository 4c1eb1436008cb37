"""Numba kernels for the per-point hot paths: tree descent and routing.

Everything here operates on the pool's parallel arrays plus explicit
64-bit RNG state, so runs are reproducible from integer seeds alone.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .pool import NO_NODE

# splitmix64 constants
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.1102230246251565e-16  # 2**-53


@njit(cache=True)
def next_uniform(rng_state):
    """splitmix64 step mapped to a double in [0, 1)."""
    rng_state[0] += _GAMMA
    z = rng_state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * _INV_2_53


@njit(cache=True)
def train_point(parent, left, right, split_dim, split_value, split_time,
                lower, upper, counters, allocated, free_stack, pool_state,
                root, x, label, rng_state):
    """Route one labeled point through a nonempty tree.

    A new branch may appear only where the point falls outside a node's
    box and the exponential clock beats the node's split time. When the
    pool cannot supply the pair for a split, the rest of the descent
    runs in extend-only mode (boxes widen, counters grow, no new nodes).

    Returns (grew, new_root, denied) where denied reports a refused
    allocation.
    """
    feature_count = x.shape[0]
    label_count = counters.shape[1]
    j = root
    parent_time = 0.0
    can_split = True
    denied = False
    while True:
        gap = 0.0
        for d in range(feature_count):
            v = x[d]
            if v < lower[j, d]:
                gap += lower[j, d] - v
            elif v > upper[j, d]:
                gap += v - upper[j, d]
        if can_split and gap > 0.0:
            wait = -np.log(1.0 - next_uniform(rng_state)) / gap
            candidate_time = parent_time + wait
            if candidate_time < split_time[j]:
                if pool_state[0] >= 2:
                    pool_state[0] -= 1
                    new_parent = free_stack[pool_state[0]]
                    pool_state[0] -= 1
                    sibling = free_stack[pool_state[0]]
                    allocated[new_parent] = True
                    allocated[sibling] = True

                    # Split dimension drawn proportionally to how far the
                    # point sticks out of the box along each axis.
                    target = next_uniform(rng_state) * gap
                    acc = 0.0
                    dim = feature_count - 1
                    for d in range(feature_count):
                        v = x[d]
                        if v < lower[j, d]:
                            acc += lower[j, d] - v
                        elif v > upper[j, d]:
                            acc += v - upper[j, d]
                        if target < acc:
                            dim = d
                            break
                    if x[dim] < lower[j, dim]:
                        edge_lo = x[dim]
                        edge_hi = lower[j, dim]
                    else:
                        edge_lo = upper[j, dim]
                        edge_hi = x[dim]
                    cut = edge_lo + next_uniform(rng_state) * (edge_hi - edge_lo)

                    split_dim[new_parent] = dim
                    split_value[new_parent] = cut
                    split_time[new_parent] = candidate_time
                    for d in range(feature_count):
                        lo = lower[j, d]
                        hi = upper[j, d]
                        v = x[d]
                        lower[new_parent, d] = v if v < lo else lo
                        upper[new_parent, d] = v if v > hi else hi
                    # The new parent summarizes the displaced subtree plus
                    # the point that triggered the split.
                    for l in range(label_count):
                        counters[new_parent, l] = counters[j, l]
                    counters[new_parent, label] += 1

                    for d in range(feature_count):
                        lower[sibling, d] = x[d]
                        upper[sibling, d] = x[d]
                    for l in range(label_count):
                        counters[sibling, l] = 0
                    counters[sibling, label] = 1
                    split_dim[sibling] = NO_NODE
                    split_value[sibling] = 0.0
                    split_time[sibling] = np.inf
                    left[sibling] = NO_NODE
                    right[sibling] = NO_NODE
                    parent[sibling] = new_parent

                    grandparent = parent[j]
                    parent[new_parent] = grandparent
                    new_root = root
                    if grandparent == NO_NODE:
                        new_root = new_parent
                    elif left[grandparent] == j:
                        left[grandparent] = new_parent
                    else:
                        right[grandparent] = new_parent
                    parent[j] = new_parent
                    if x[dim] <= cut:
                        left[new_parent] = sibling
                        right[new_parent] = j
                    else:
                        left[new_parent] = j
                        right[new_parent] = sibling
                    return True, new_root, denied
                denied = True
                can_split = False
        # Extend-node step: widen the box, count the label, descend.
        for d in range(feature_count):
            v = x[d]
            if v < lower[j, d]:
                lower[j, d] = v
            elif v > upper[j, d]:
                upper[j, d] = v
        counters[j, label] += 1
        if left[j] == NO_NODE:
            return False, root, denied
        parent_time = split_time[j]
        if x[split_dim[j]] <= split_value[j]:
            j = left[j]
        else:
            j = right[j]


@njit(cache=True)
def leaf_for(left, right, split_dim, split_value, root, x):
    """Pure split routing from root to a leaf, ignoring boxes."""
    j = root
    while left[j] != NO_NODE:
        if x[split_dim[j]] <= split_value[j]:
            j = left[j]
        else:
            j = right[j]
    return j


@njit(cache=True)
def accumulate_votes(parent, left, right, split_dim, split_value, counters,
                     roots, x, out):
    """Sum normalized leaf-counter distributions over nonempty trees.

    A leaf whose counters are all zero defers to its nearest ancestor
    with mass. Returns the number of trees that voted.
    """
    active = 0
    label_count = out.shape[0]
    for k in range(roots.shape[0]):
        j = roots[k]
        if j == NO_NODE:
            continue
        while left[j] != NO_NODE:
            if x[split_dim[j]] <= split_value[j]:
                j = left[j]
            else:
                j = right[j]
        node = j
        while node != NO_NODE:
            total = 0
            for l in range(label_count):
                total += counters[node, l]
            if total > 0:
                inv = 1.0 / total
                for l in range(label_count):
                    out[l] += counters[node, l] * inv
                break
            node = parent[node]
        active += 1
    return active
