"""Fixed-capacity node arena shared by every tree of a forest.

Nodes live in parallel numpy arrays indexed by integer slot; ``NO_NODE``
(-1) is the null reference. The arena never grows, which is what turns a
byte budget into a hard bound on forest size: once fewer than two slots
are free, splits are denied and trees keep training in extend-only mode.
"""

from __future__ import annotations

import numpy as np

NO_NODE = -1


class PoolError(RuntimeError):
    """Raised on double-free or release of a slot the pool never handed out."""


def node_footprint(feature_count: int, label_count: int) -> int:
    """Modeled per-node byte cost used to derive pool capacity.

    Bounds count as 8-byte reals, label counters and the three node
    references as 4-byte integers, the split dimension as 4 bytes, and
    the split value and split time as 8 bytes each.
    """
    if feature_count < 1:
        raise ValueError("feature_count must be >= 1")
    if label_count < 2:
        raise ValueError("label_count must be >= 2")
    bounds = 8 * 2 * feature_count
    counters = 4 * label_count
    references = 4 * 3
    return bounds + counters + references + 4 + 8 + 8


class NodePool:
    """Arena of tree nodes with a fixed slot count.

    Allocation granularity is a pair because a Mondrian split always
    creates exactly one new parent plus one sibling; a lone root is
    modeled as a pair with the spare slot released immediately.
    """

    def __init__(self, capacity: int, feature_count: int, label_count: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if feature_count < 1 or label_count < 2:
            raise ValueError("need feature_count >= 1 and label_count >= 2")
        self.capacity = capacity
        self.feature_count = feature_count
        self.label_count = label_count

        self.parent = np.full(capacity, NO_NODE, dtype=np.int64)
        self.left = np.full(capacity, NO_NODE, dtype=np.int64)
        self.right = np.full(capacity, NO_NODE, dtype=np.int64)
        self.split_dim = np.full(capacity, NO_NODE, dtype=np.int64)
        self.split_value = np.zeros(capacity, dtype=np.float64)
        self.split_time = np.zeros(capacity, dtype=np.float64)
        self.lower = np.zeros((capacity, feature_count), dtype=np.float64)
        self.upper = np.zeros((capacity, feature_count), dtype=np.float64)
        self.counters = np.zeros((capacity, label_count), dtype=np.int64)
        self.allocated = np.zeros(capacity, dtype=np.bool_)

        # Free slots form a stack in free_stack[:state[0]]; state is an
        # array so the training kernel can pop from it in place.
        self.free_stack = np.arange(capacity - 1, -1, -1, dtype=np.int64)
        self.state = np.array([capacity], dtype=np.int64)

    @classmethod
    def from_memory(cls, memory_bytes: int, feature_count: int, label_count: int) -> "NodePool":
        """Build a pool whose capacity is ``memory_bytes`` worth of nodes."""
        footprint = node_footprint(feature_count, label_count)
        capacity = memory_bytes // footprint
        if capacity < 1:
            raise ValueError(
                f"memory budget of {memory_bytes} bytes is below one node ({footprint} bytes)"
            )
        return cls(capacity, feature_count, label_count)

    @property
    def free(self) -> int:
        return int(self.state[0])

    @property
    def used(self) -> int:
        return self.capacity - int(self.state[0])

    def allocate_pair(self) -> tuple[int, int] | None:
        """Take two fresh slots, or return None when fewer than two are free.

        Unavailability is a normal outcome (it pauses the requesting
        tree), not an error.
        """
        if self.state[0] < 2:
            return None
        first = self._pop()
        second = self._pop()
        self._reset_slot(first)
        self._reset_slot(second)
        return first, second

    def allocate_root(self) -> int | None:
        """Take a single slot for a new tree root.

        Realized as a pair allocation with the spare released, so a root
        also requires two free slots at the moment of allocation.
        """
        pair = self.allocate_pair()
        if pair is None:
            return None
        root, spare = pair
        self.release((spare,))
        return root

    def release(self, refs) -> None:
        """Return slots to the free stack. Double-free aborts the run."""
        refs = [int(ref) for ref in refs]
        seen: set[int] = set()
        for ref in refs:
            if ref < 0 or ref >= self.capacity or not self.allocated[ref]:
                raise PoolError(f"slot {ref} is not currently allocated")
            if ref in seen:
                raise PoolError(f"slot {ref} released twice in one call")
            seen.add(ref)
        for ref in refs:
            self.allocated[ref] = False
            self.free_stack[self.state[0]] = ref
            self.state[0] += 1

    def _pop(self) -> int:
        self.state[0] -= 1
        slot = int(self.free_stack[self.state[0]])
        self.allocated[slot] = True
        return slot

    def _reset_slot(self, slot: int) -> None:
        self.parent[slot] = NO_NODE
        self.left[slot] = NO_NODE
        self.right[slot] = NO_NODE
        self.split_dim[slot] = NO_NODE
        self.split_value[slot] = 0.0
        self.split_time[slot] = 0.0
        self.lower[slot, :] = 0.0
        self.upper[slot, :] = 0.0
        self.counters[slot, :] = 0

    def __repr__(self) -> str:
        return (
            f"NodePool(capacity={self.capacity}, used={self.used}, "
            f"F={self.feature_count}, L={self.label_count})"
        )
