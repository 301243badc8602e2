"""Layered thresholded CountSketch and its learned, parsimonious and
single-table variants.

The layered sketch keeps ``T - 1`` narrow CountSketch tables and one wide
one.  A query takes the median of the narrow tables' estimates; if that is
below a threshold the answer is 0, otherwise the wide table answers.  The
threshold is either ``c_thr * T * A / B`` with ``A = N / H_n`` (the Zipf
scale implied by total weight ``N`` over ``n`` items) or, in worst-case mode,
the square root of a tail-norm estimate.
"""
from __future__ import annotations

import enum
import functools
import math

import numpy as np

from .hashing import derive_seed
from .learned import HeavyHitterOracle, LearnedSketch
from .sketches import (InvalidConfigurationError, Mode, SketchTable, cols_for_space,
                       median_index)
from .tail import DEFAULT_SIGNS, TailEstimator


def choose_tables(n: int) -> int:
    """Number of tables T for domain size n: ``max(3, ceil(log2 log2 n))``, made even."""
    t = 3
    if n > 4:
        t = max(3, math.ceil(math.log2(math.log2(n))))
    if (t - 1) % 2 == 0:
        t += 1
    return t


@functools.lru_cache(maxsize=64)
def harmonic(n: int) -> float:
    if n < 1:
        return 0.0
    if n < 10**6:
        return math.fsum(1.0 / i for i in range(1, n + 1))
    # Euler-Maclaurin; error below 1e-24 at this size
    return math.log(n) + 0.5772156649015329 + 1 / (2 * n) - 1 / (12 * n * n)


def compute_threshold(n: int, space: int, total_weight: float, T: int | None = None,
                      c_thr: float = 1.0, tail_value: float | None = None) -> float:
    """Zero-threshold for the layered query.

    With ``tail_value`` given this is ``sqrt(tail_value)``; otherwise
    ``c_thr * T * (total_weight / H_n) / space``.
    """
    if space <= 0:
        raise InvalidConfigurationError("space must be positive")
    if total_weight < 0:
        raise ValueError("total weight must be non-negative")
    if tail_value is not None:
        return math.sqrt(max(tail_value, 0.0))
    if T is None:
        T = choose_tables(n)
    hn = harmonic(n)
    if hn == 0:
        return 0.0
    return c_thr * T * (total_weight / hn) / space


class LayeredSketch:
    """``T - 1`` small CountSketch tables gating one big table.

    With ``rows`` rows, small tables get ``total_space // (2 * rows * T)``
    columns and the big table ``total_space // (2 * rows)`` (for three rows:
    B/(6T) and B/6).  ``threshold_space`` is the B in the threshold formula
    and defaults to ``total_space``.

    ``worst_case=True`` splits the budget: the tables are sized from half of
    it and a :class:`TailEstimator` with ``(total_space // 2) // n_signs``
    copies takes the other half; the threshold becomes ``sqrt(V)``.
    """

    def __init__(self, n_domain: int, total_space: int, rows: int = 3, seed: int = 0,
                 c_thr: float = 1.0, T: int | None = None,
                 threshold_space: int | None = None, worst_case: bool = False,
                 tail_copies: int | None = None, n_signs: int = DEFAULT_SIGNS,
                 allow_even_rows: bool = False):
        self.n_domain = n_domain
        self.T = choose_tables(n_domain) if T is None else T
        if self.T < 3 or (self.T - 1) % 2 == 0:
            raise InvalidConfigurationError(f"T must be >= 3 with T-1 odd, got {self.T}")
        self.total_space = total_space
        self.rows = rows
        self.seed = int(seed)
        self.c_thr = c_thr
        self.threshold_space = total_space if threshold_space is None else threshold_space
        self.worst_case = worst_case
        table_space = total_space // 2 if worst_case else total_space
        small_cols = cols_for_space(1, table_space // (2 * rows * self.T))
        big_cols = cols_for_space(1, table_space // (2 * rows))
        self.small_tables = [
            SketchTable(rows, small_cols, Mode.COUNT_SKETCH, derive_seed(self.seed, j),
                        allow_even_rows=allow_even_rows)
            for j in range(self.T - 1)]
        self.big_table = SketchTable(rows, big_cols, Mode.COUNT_SKETCH,
                                     derive_seed(self.seed, self.T - 1),
                                     allow_even_rows=allow_even_rows)
        self.tail = None
        if worst_case:
            copies = tail_copies if tail_copies is not None else (total_space // 2) // n_signs
            self.tail = TailEstimator(copies, small_cols, derive_seed(self.seed, 7919),
                                      n_signs)
        self.total_weight = 0
        self.fixed_threshold: float | None = None

    @property
    def tables(self) -> list[SketchTable]:
        return [*self.small_tables, self.big_table]

    @property
    def space(self) -> int:
        s = sum(t.space for t in self.tables)
        return s + (self.tail.space if self.tail is not None else 0)

    def update(self, item: int, delta: int = 1) -> None:
        self.total_weight += int(delta)
        for t in self.tables:
            t.update(item, delta)
        if self.tail is not None:
            self.tail.update(item, delta)

    def update_many(self, items, deltas=None) -> None:
        items = np.asarray(items, dtype=np.uint64)
        deltas = (np.ones(items.shape, dtype=np.int64) if deltas is None
                  else np.asarray(deltas, dtype=np.int64))
        self.total_weight += int(deltas.sum())
        for t in self.tables:
            t.update_many(items, deltas)
        if self.tail is not None:
            self.tail.update_many(items, deltas)

    def threshold(self, total_weight: float | None = None) -> float:
        if self.fixed_threshold is not None:
            return self.fixed_threshold
        if self.tail is not None:
            return compute_threshold(self.n_domain, self.threshold_space, 0,
                                     tail_value=self.tail.finalize())
        w = self.total_weight if total_weight is None else total_weight
        return compute_threshold(self.n_domain, self.threshold_space, max(w, 0),
                                 self.T, self.c_thr)

    def small_median(self, items) -> np.ndarray:
        est = np.stack([t.query_many(items) for t in self.small_tables])
        est.sort(axis=0)
        return est[median_index(len(self.small_tables))]

    def query_many(self, items, total_weight: float | None = None) -> np.ndarray:
        items = np.asarray(items, dtype=np.uint64)
        gate = self.small_median(items)
        big = self.big_table.query_many(items)
        return np.where(gate < self.threshold(total_weight), 0, big)

    def query(self, item: int, total_weight: float | None = None) -> int:
        return int(self.query_many(np.array([item], dtype=np.uint64), total_weight)[0])


def layered_update(s: LayeredSketch, item: int, delta: int = 1) -> None:
    s.update(item, delta)


def layered_query(s: LayeredSketch, item: int) -> int:
    return s.query(item)


class LearnedLayered(LearnedSketch):
    """Exact table for predicted heavy items plus a layered sketch for the rest.

    The layered part gets ``total_space - capacity`` counters but keeps the
    full ``total_space`` (and the full stream weight) in its threshold.
    """

    def __init__(self, oracle: HeavyHitterOracle, n_domain: int, total_space: int,
                 rows: int = 3, seed: int = 0, c_thr: float = 1.0, T: int | None = None,
                 exact_fraction: float = 0.5, worst_case: bool = False, **kw):
        capacity = int(total_space * exact_fraction)
        base = LayeredSketch(n_domain, total_space - capacity, rows, seed, c_thr, T,
                             threshold_space=total_space, worst_case=worst_case, **kw)
        super().__init__(oracle, base, capacity)

    def _base_estimates(self, items):
        return self.base.query_many(items, total_weight=max(self.total_weight, 0))


class QueryMode(str, enum.Enum):
    KNOWN_LENGTH = "known"
    ANYTIME = "anytime"


class ParsimoniousLayered(LearnedLayered):
    """Learned layered sketch that consults the oracle only on a random sample.

    An update ``(i, d)`` for an item not yet classified heavy queries the
    oracle with probability ``min(1, gamma * B * ln(n)^2 * |d| / m)`` when the
    total stream weight ``m`` is known, or ``min(1, gamma * B * ln(n)^3 / j)``
    at stream position ``j`` otherwise.  A positive answer starts an exact
    count from that update on; nothing else is remembered about the item.

    One uniform draw is consumed per update, classified or not, so batch and
    one-at-a-time ingestion see the same random numbers.
    """

    def __init__(self, oracle: HeavyHitterOracle, n_domain: int, total_space: int,
                 gamma: float = 1.0, stream_weight: int | None = None,
                 rows: int = 3, seed: int = 0, c_thr: float = 1.0, T: int | None = None,
                 **kw):
        super().__init__(oracle, n_domain, total_space, rows, seed, c_thr, T, **kw)
        if gamma < 0:
            raise ValueError("gamma must be non-negative")
        self.gamma = gamma
        self.mode = QueryMode.KNOWN_LENGTH if stream_weight is not None else QueryMode.ANYTIME
        if stream_weight is not None and stream_weight <= 0:
            raise ValueError("stream weight must be positive in known-length mode")
        self.stream_weight = stream_weight
        self.position = 0
        self._rng = np.random.default_rng(derive_seed(int(seed), 424242))
        log_n = math.log(n_domain) if n_domain > 1 else 0.0
        if self.mode is QueryMode.KNOWN_LENGTH:
            self._rate = gamma * total_space * log_n ** 2 / stream_weight
        else:
            self._rate = gamma * total_space * log_n ** 3

    def query_probability(self, delta: int, position: int) -> float:
        if self.mode is QueryMode.KNOWN_LENGTH:
            return min(1.0, self._rate * abs(delta))
        return min(1.0, self._rate / position)

    def _probabilities(self, deltas: np.ndarray, start: int) -> np.ndarray:
        if self.mode is QueryMode.KNOWN_LENGTH:
            return np.minimum(1.0, self._rate * np.abs(deltas).astype(np.float64))
        pos = np.arange(start + 1, start + deltas.size + 1, dtype=np.float64)
        return np.minimum(1.0, self._rate / pos)

    def update(self, item: int, delta: int = 1) -> None:
        item, delta = int(item), int(delta)
        self.position += 1
        self.total_weight += delta
        u = self._rng.random()
        if item in self.exact.entries:
            self.exact.add(item, delta)
            return
        if u < self.query_probability(delta, self.position) and self.oracle.predict(item):
            if self.exact.admit(item):
                self.exact.add(item, delta)
                return
        self.base.update(item, delta)

    def update_many(self, items, deltas=None) -> None:
        items = np.asarray(items, dtype=np.uint64)
        deltas = (np.ones(items.shape, dtype=np.int64) if deltas is None
                  else np.asarray(deltas, dtype=np.int64))
        m = items.size
        if m == 0:
            return
        u = self._rng.random(m)
        sampled = np.flatnonzero(u < self._probabilities(deltas, self.position))
        self.position += m
        self.total_weight += int(deltas.sum())
        # classification time (index into this batch) of every tracked item
        start_at = {i: 0 for i in self.exact.entries}
        newly = {}
        for j, item in zip(sampled.tolist(), items[sampled].tolist()):
            if item in start_at or item in newly:
                continue
            if self.oracle.predict(item) and self.exact.admit(item):
                newly[item] = j
        start_at.update(newly)
        to_exact = np.zeros(m, dtype=bool)
        if start_at:
            keys = np.fromiter(start_at, dtype=np.uint64, count=len(start_at))
            starts = np.fromiter(start_at.values(), dtype=np.int64, count=len(start_at))
            order = np.argsort(keys)
            keys, starts = keys[order], starts[order]
            pos = np.searchsorted(keys, items)
            pos[pos >= keys.size] = 0
            hit = keys[pos] == items
            to_exact = hit & (np.arange(m) >= starts[pos])
        if to_exact.any():
            uniq, inv = np.unique(items[to_exact], return_inverse=True)
            sums = np.zeros(uniq.size, dtype=np.int64)
            np.add.at(sums, inv, deltas[to_exact])
            for item, d in zip(uniq.tolist(), sums.tolist()):
                self.exact.add(item, d)
        rest = ~to_exact
        if rest.any():
            self.base.update_many(items[rest], deltas[rest])


def parsimonious_update(s: ParsimoniousLayered, item: int, delta: int = 1) -> None:
    s.update(item, delta)


class PracticalSketch:
    """Single CountSketch table whose estimates below ``c * n / w`` become 0.

    ``w`` is the table width, ``total_space // rows``.
    """

    def __init__(self, n_domain: int, total_space: int, rows: int = 3, c: float = 1.0,
                 seed: int = 0):
        self.table = SketchTable.from_space(rows, total_space, Mode.COUNT_SKETCH, seed)
        self.n_domain = n_domain
        self.c = c

    @property
    def width(self) -> int:
        return self.table.cols

    @property
    def space(self) -> int:
        return self.table.space

    @property
    def threshold(self) -> float:
        return self.c * self.n_domain / self.width

    def update(self, item: int, delta: int = 1) -> None:
        self.table.update(item, delta)

    def update_many(self, items, deltas=None) -> None:
        self.table.update_many(items, deltas)

    def query_many(self, items) -> np.ndarray:
        est = self.table.query_many(items)
        return np.where(est < self.threshold, 0, est)

    def query(self, item: int) -> int:
        est = self.table.query(item)
        return 0 if est < self.threshold else est


def practical_query(s: PracticalSketch, item: int) -> int:
    return s.query(item)
