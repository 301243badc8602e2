"""Tail-norm estimation: the squared l2 norm of f with its heaviest entries
removed, divided by a bucket count.  Used as a distribution-free threshold for
the layered sketch.

Each :class:`BasicTailSketch` keeps AMS-style signed sums for the items that
land in one designated bucket (index 0) of a 4-wise hash into ``buckets``
cells.  :class:`TailEstimator` runs many independent copies and reports a
high order statistic of their values.
"""
from __future__ import annotations

import numpy as np

from .hashing import derive_seed, make_hash, make_sign_hash
from .sketches import InvalidConfigurationError

DEFAULT_SIGNS = 32
TRACKED_BUCKET = 0


class BasicTailSketch:
    def __init__(self, buckets: int, seed: int = 0, n_signs: int = DEFAULT_SIGNS):
        if buckets < 1:
            raise InvalidConfigurationError("buckets must be >= 1")
        if n_signs < 1:
            raise InvalidConfigurationError("need at least one sign function")
        self.buckets = buckets
        self.seed = int(seed)
        self.h = make_hash(derive_seed(self.seed, 0), 4, buckets)
        self.signs = [make_sign_hash(derive_seed(self.seed, j + 1), 4)
                      for j in range(n_signs)]
        self.acc = np.zeros(n_signs, dtype=np.int64)

    @property
    def n_signs(self) -> int:
        return len(self.signs)

    def update(self, item: int, delta: int = 1) -> None:
        if self.h(item) != TRACKED_BUCKET:
            return
        for j, s in enumerate(self.signs):
            self.acc[j] += s(item) * int(delta)

    def update_many(self, items, deltas) -> None:
        items = np.asarray(items, dtype=np.uint64)
        deltas = np.asarray(deltas, dtype=np.int64)
        hit = self.h.many(items) == TRACKED_BUCKET
        if not hit.any():
            return
        items, deltas = items[hit], deltas[hit]
        for j, s in enumerate(self.signs):
            self.acc[j] += int((s.many(items) * deltas).sum())

    def value(self) -> float:
        # squares summed as Python ints; the only rounding is the final division
        return sum(int(z) ** 2 for z in self.acc) / self.n_signs


def tail_finalize(copies) -> float:
    """Return the ``floor(len/3)``-th largest copy value (1-indexed)."""
    values = sorted((c.value() if isinstance(c, BasicTailSketch) else float(c)
                     for c in copies), reverse=True)
    if len(values) < 3:
        raise InvalidConfigurationError("need at least 3 tail sketch copies")
    return values[len(values) // 3 - 1]


class TailEstimator:
    """``copies`` independent :class:`BasicTailSketch` instances fed the same stream."""

    def __init__(self, copies: int, buckets: int, seed: int = 0,
                 n_signs: int = DEFAULT_SIGNS):
        if copies < 3:
            raise InvalidConfigurationError(f"need at least 3 copies, got {copies}")
        self.copies = [BasicTailSketch(buckets, derive_seed(seed, 1000 + k), n_signs)
                       for k in range(copies)]

    @property
    def space(self) -> int:
        return sum(c.n_signs for c in self.copies)

    def update(self, item: int, delta: int = 1) -> None:
        for c in self.copies:
            c.update(item, delta)

    def update_many(self, items, deltas) -> None:
        items = np.asarray(items, dtype=np.uint64)
        deltas = np.asarray(deltas, dtype=np.int64)
        for c in self.copies:
            c.update_many(items, deltas)

    def values(self) -> list[float]:
        return [c.value() for c in self.copies]

    def finalize(self) -> float:
        return tail_finalize(self.copies)


def exact_tail_norm(f, head: int):
    """Squared l2 norm of ``f`` after removing its ``head`` largest-magnitude entries."""
    if head < 0:
        raise ValueError("head size must be >= 0")
    vals = sorted((abs(v) for v in np.asarray(f).tolist()), reverse=True)
    return sum(v * v for v in vals[head:])
