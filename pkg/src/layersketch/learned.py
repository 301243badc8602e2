"""Heavy-hitter oracles and the learned-sketch wrapper.

A learned sketch spends part of its space on an exact table for items the
oracle flags as heavy and sends everything else to a base sketch.  Each item
is classified on its first appearance and keeps that classification for the
rest of the run; the exact table admits flagged items first come, first kept.
"""
from __future__ import annotations

import enum
from pathlib import Path

import numpy as np

from .sketches import Mode, SketchTable, cols_for_space


class OracleKind(str, enum.Enum):
    PERFECT = "perfect"
    LOOKUP = "lookup"
    NOISY = "noisy"


class HeavyHitterOracle:
    """Answers "is this item heavy?" and counts how often it was asked.

    ``Noisy`` oracles flip the set-membership answer independently with
    probability ``flip_prob`` using their own seeded generator.
    """

    def __init__(self, heavy_set=(), kind: OracleKind | str = OracleKind.PERFECT,
                 flip_prob: float = 0.0, seed: int = 0):
        self.kind = OracleKind(kind)
        if not 0.0 <= flip_prob <= 1.0:
            raise ValueError(f"flip_prob must be in [0, 1], got {flip_prob}")
        if self.kind is not OracleKind.NOISY and flip_prob:
            raise ValueError("only noisy oracles take a flip probability")
        self.heavy_set = frozenset(int(i) for i in heavy_set)
        self._heavy_arr = np.array(sorted(self.heavy_set), dtype=np.uint64)
        self.flip_prob = float(flip_prob)
        self.queries_made = 0
        self._rng = np.random.default_rng(seed)

    def __repr__(self):
        return (f"HeavyHitterOracle(kind={self.kind.value}, |heavy|={len(self.heavy_set)}, "
                f"flip_prob={self.flip_prob})")

    @classmethod
    def from_file(cls, path) -> "HeavyHitterOracle":
        return cls(read_lookup_file(path), OracleKind.LOOKUP)

    def predict(self, item: int) -> bool:
        self.queries_made += 1
        ans = int(item) in self.heavy_set
        if self.kind is OracleKind.NOISY and self._rng.random() < self.flip_prob:
            ans = not ans
        return ans

    def predict_many(self, items) -> np.ndarray:
        """Same answers, in order, as calling :meth:`predict` on each item."""
        items = np.asarray(items, dtype=np.uint64)
        self.queries_made += int(items.size)
        ans = np.isin(items, self._heavy_arr)
        if self.kind is OracleKind.NOISY:
            ans ^= self._rng.random(items.size) < self.flip_prob
        return ans


def always_false_oracle() -> HeavyHitterOracle:
    return HeavyHitterOracle((), OracleKind.LOOKUP)


def read_lookup_file(path) -> list[int]:
    """Parse a lookup-oracle file: one decimal item id per line, duplicates ignored."""
    seen: dict[int, None] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            item = int(line, 10)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a decimal item id: {line!r}") from None
        if item < 0:
            raise ValueError(f"{path}:{lineno}: negative item id")
        seen.setdefault(item, None)
    return list(seen)


class ExactTable:
    """Exact counts for up to ``capacity`` items."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self.entries: dict[int, int] = {}
        self.rejected_heavy = 0

    def __len__(self):
        return len(self.entries)

    def __contains__(self, item):
        return int(item) in self.entries

    def admit(self, item: int) -> bool:
        item = int(item)
        if item in self.entries:
            return True
        if len(self.entries) >= self.capacity:
            self.rejected_heavy += 1
            return False
        self.entries[item] = 0
        return True

    def add(self, item: int, delta: int) -> None:
        self.entries[int(item)] += int(delta)


def _aggregate(items: np.ndarray, deltas: np.ndarray):
    uniq, inv = np.unique(items, return_inverse=True)
    sums = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(sums, inv, deltas)
    return uniq, sums


def first_appearance_order(items: np.ndarray) -> np.ndarray:
    uniq, first = np.unique(items, return_index=True)
    return uniq[np.argsort(first, kind="stable")]


class LearnedSketch:
    """Exact table for oracle-flagged items in front of an arbitrary base sketch.

    The base must offer ``update``, ``update_many``, ``query``, ``query_many``
    and a ``space`` attribute.
    """

    def __init__(self, oracle: HeavyHitterOracle, base, capacity: int):
        self.oracle = oracle
        self.base = base
        self.exact = ExactTable(capacity)
        self.total_weight = 0
        self._routes: dict[int, bool] = {}

    @property
    def space(self) -> int:
        return self.exact.capacity + self.base.space

    def _classify(self, item: int) -> bool:
        route = self._routes.get(item)
        if route is None:
            route = self.oracle.predict(item) and self.exact.admit(item)
            self._routes[item] = route
        return route

    def update(self, item: int, delta: int = 1) -> None:
        item, delta = int(item), int(delta)
        self.total_weight += delta
        if self._classify(item):
            self.exact.add(item, delta)
        else:
            self.base.update(item, delta)

    def update_many(self, items, deltas=None) -> None:
        items = np.asarray(items, dtype=np.uint64)
        deltas = (np.ones(items.shape, dtype=np.int64) if deltas is None
                  else np.asarray(deltas, dtype=np.int64))
        if items.size == 0:
            return
        self.total_weight += int(deltas.sum())
        fresh = first_appearance_order(items)
        fresh = np.array([i for i in fresh.tolist() if i not in self._routes], dtype=np.uint64)
        if fresh.size:
            flagged = self.oracle.predict_many(fresh)
            for item, flag in zip(fresh.tolist(), flagged.tolist()):
                self._routes[item] = bool(flag) and self.exact.admit(item)
        tracked = np.fromiter(self.exact.entries, dtype=np.uint64, count=len(self.exact))
        heavy = np.isin(items, tracked)
        if heavy.any():
            for item, d in zip(*_aggregate(items[heavy], deltas[heavy])):
                self.exact.add(item, d)
        light = ~heavy
        if light.any():
            self.base.update_many(items[light], deltas[light])

    def _base_estimates(self, items: np.ndarray) -> np.ndarray:
        return self.base.query_many(items)

    def query_many(self, items) -> np.ndarray:
        items = np.asarray(items, dtype=np.uint64)
        out = self._base_estimates(items)
        if len(self.exact):
            for k, item in enumerate(items.tolist()):
                v = self.exact.entries.get(item)
                if v is not None:
                    out[k] = v
        return out

    def query(self, item: int) -> int:
        return int(self.query_many(np.array([item], dtype=np.uint64))[0])


def learned_sketch(oracle: HeavyHitterOracle, total_space: int, rows: int = 3,
                   mode: Mode | str = Mode.COUNT_SKETCH, seed: int = 0,
                   exact_fraction: float = 0.5) -> LearnedSketch:
    """Split ``total_space`` between exact slots and a CM/CS base table."""
    capacity = int(total_space * exact_fraction)
    base = SketchTable(rows, cols_for_space(rows, total_space - capacity), mode, seed)
    return LearnedSketch(oracle, base, capacity)


def learned_update(s: LearnedSketch, item: int, delta: int = 1) -> None:
    s.update(item, delta)


def learned_query(s: LearnedSketch, item: int) -> int:
    return s.query(item)


def predict(o: HeavyHitterOracle, item: int) -> bool:
    return o.predict(item)
