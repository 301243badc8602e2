"""CountMin and CountSketch tables over int64 counters."""
from __future__ import annotations

import enum
import hashlib
import warnings
from typing import NamedTuple

import numpy as np

from .hashing import DEFAULT_DEGREE, derive_seed, make_hash, make_sign_hash

INT64_MAX = np.iinfo(np.int64).max
INT64_MIN = np.iinfo(np.int64).min


class StreamUpdate(NamedTuple):
    item: int
    delta: int = 1


class InvalidConfigurationError(ValueError):
    pass


class CounterOverflowWarning(RuntimeWarning):
    pass


class Mode(str, enum.Enum):
    COUNT_MIN = "cm"
    COUNT_SKETCH = "cs"


def median_index(k: int) -> int:
    # lower middle; equals the true median for odd k
    return (k - 1) // 2


def cols_for_space(rows: int, total_space: int) -> int:
    cols = total_space // rows if rows > 0 else 0
    if cols < 1:
        raise InvalidConfigurationError(
            f"space {total_space} too small for {rows} rows (cols would be 0)")
    return cols


class SketchTable:
    """A ``rows x cols`` counter array with one hash (and for CS one sign) per row.

    ``seed`` is the single user-facing seed; row ``l`` uses
    ``derive_seed(seed, 2l)`` for its bucket hash and ``derive_seed(seed, 2l+1)``
    for its sign hash.  Even row counts are rejected in CountSketch mode
    unless ``allow_even_rows`` is set, in which case the lower median is used.
    """

    def __init__(self, rows: int, cols: int, mode: Mode | str = Mode.COUNT_SKETCH,
                 seed: int = 0, degree: int = DEFAULT_DEGREE,
                 allow_even_rows: bool = False):
        mode = Mode(mode)
        if rows < 1:
            raise InvalidConfigurationError(f"rows must be >= 1, got {rows}")
        if cols < 1:
            raise InvalidConfigurationError(f"cols must be >= 1, got {cols}")
        if mode is Mode.COUNT_SKETCH and rows % 2 == 0 and not allow_even_rows:
            raise InvalidConfigurationError("CountSketch needs an odd number of rows")
        self.rows = rows
        self.cols = cols
        self.mode = mode
        self.seed = int(seed)
        self.counters = np.zeros((rows, cols), dtype=np.int64)
        self.row_hashes = [make_hash(derive_seed(self.seed, 2 * r), degree, cols)
                           for r in range(rows)]
        if mode is Mode.COUNT_SKETCH:
            self.row_signs = [make_sign_hash(derive_seed(self.seed, 2 * r + 1), degree)
                              for r in range(rows)]
        else:
            self.row_signs = None
        self.total_updates = 0
        self.overflowed = False
        self.frozen = False
        self._abs_mass = 0
        self._located = None

    @classmethod
    def from_space(cls, rows: int, total_space: int, mode=Mode.COUNT_SKETCH,
                   seed: int = 0, **kw) -> "SketchTable":
        return cls(rows, cols_for_space(rows, total_space), mode, seed, **kw)

    @property
    def space(self) -> int:
        return self.rows * self.cols

    def __repr__(self):
        return (f"SketchTable(mode={self.mode.value}, rows={self.rows}, "
                f"cols={self.cols}, seed={self.seed})")

    def freeze(self) -> None:
        self.frozen = True

    # -- ingestion ---------------------------------------------------------

    def _check_writable(self):
        if self.frozen:
            raise RuntimeError("sketch is frozen; no further updates allowed")

    def update(self, item: int, delta: int = 1) -> None:
        self._check_writable()
        delta = int(delta)
        self.total_updates += 1
        self._abs_mass += abs(delta)
        for r in range(self.rows):
            b = self.row_hashes[r](item)
            d = delta if self.row_signs is None else self.row_signs[r](item) * delta
            if self._abs_mass > INT64_MAX:
                self._add_checked(r, np.array([b]), np.array([d], dtype=object))
            else:
                self.counters[r, b] += d

    def update_many(self, items, deltas=None) -> None:
        """Apply a batch of updates; equivalent to calling :meth:`update` in order."""
        self._check_writable()
        items = np.asarray(items, dtype=np.uint64)
        if deltas is None:
            deltas = np.ones(items.shape, dtype=np.int64)
        else:
            deltas = np.asarray(deltas, dtype=np.int64)
        if items.shape != deltas.shape:
            raise ValueError("items and deltas must have the same shape")
        if items.size == 0:
            return
        self.total_updates += int(items.size)
        self._abs_mass += _abs_sum(deltas)
        exact = self._abs_mass > INT64_MAX
        located = self._locate(items)
        for r, (b, s) in enumerate(located):
            d = deltas if s is None else s * deltas
            if exact:
                self._add_checked(r, b, d.astype(object))
            else:
                np.add.at(self.counters[r], b, d)

    def _locate(self, items: np.ndarray):
        # batch ingest and batch query usually see the same item array; hash it once
        key = (items.size, hashlib.blake2b(items.tobytes(), digest_size=16).digest())
        if self._located is not None and self._located[0] == key:
            return self._located[1]
        located = [(self.row_hashes[r].many(items),
                    None if self.row_signs is None else self.row_signs[r].many(items))
                   for r in range(self.rows)]
        self._located = (key, located)
        return located

    def _add_checked(self, r, buckets, deltas):
        row = self.counters[r].astype(object)
        for b, d in zip(buckets, deltas):
            row[int(b)] += int(d)
        clipped = np.clip(row, INT64_MIN, INT64_MAX)
        if any(c != v for c, v in zip(clipped, row)) and not self.overflowed:
            self.overflowed = True
            warnings.warn(f"{self!r}: counter overflow, values saturated",
                          CounterOverflowWarning, stacklevel=3)
        self.counters[r] = clipped.astype(np.int64)

    # -- estimation --------------------------------------------------------

    def row_estimates(self, items) -> np.ndarray:
        """``rows x len(items)`` per-row estimates (sign-corrected in CS mode)."""
        items = np.asarray(items, dtype=np.uint64)
        out = np.empty((self.rows, items.size), dtype=np.int64)
        for r, (b, s) in enumerate(self._locate(items)):
            out[r] = self.counters[r, b]
            if s is not None:
                out[r] *= s
        return out

    def query_many(self, items) -> np.ndarray:
        est = self.row_estimates(items)
        if self.mode is Mode.COUNT_MIN:
            return est.min(axis=0)
        est.sort(axis=0)
        return est[median_index(self.rows)]

    def query(self, item: int) -> int:
        vals = []
        for r in range(self.rows):
            v = int(self.counters[r, self.row_hashes[r](item)])
            if self.row_signs is not None:
                v *= self.row_signs[r](item)
            vals.append(v)
        if self.mode is Mode.COUNT_MIN:
            return min(vals)
        return sorted(vals)[median_index(self.rows)]

    def query_nonneg_many(self, items) -> np.ndarray:
        return np.maximum(self.query_many(items), 0)


def _abs_sum(deltas: np.ndarray) -> int:
    peak = int(np.abs(deltas).max()) if deltas.min() > INT64_MIN else INT64_MAX
    if peak * deltas.size < INT64_MAX:
        return int(np.abs(deltas).sum())
    return sum(abs(int(d)) for d in deltas)


def _require(t: SketchTable, mode: Mode):
    if t.mode is not mode:
        raise InvalidConfigurationError(f"expected a {mode.value} table, got {t.mode.value}")


def count_min(rows: int, total_space: int, seed: int = 0, **kw) -> SketchTable:
    return SketchTable.from_space(rows, total_space, Mode.COUNT_MIN, seed, **kw)


def count_sketch(rows: int, total_space: int, seed: int = 0, **kw) -> SketchTable:
    return SketchTable.from_space(rows, total_space, Mode.COUNT_SKETCH, seed, **kw)


def cm_update(t: SketchTable, item: int, delta: int = 1) -> None:
    _require(t, Mode.COUNT_MIN)
    t.update(item, delta)


def cm_query(t: SketchTable, item: int) -> int:
    _require(t, Mode.COUNT_MIN)
    return t.query(item)


def cs_update(t: SketchTable, item: int, delta: int = 1) -> None:
    _require(t, Mode.COUNT_SKETCH)
    t.update(item, delta)


def cs_query(t: SketchTable, item: int) -> int:
    _require(t, Mode.COUNT_SKETCH)
    return t.query(item)


def query_nonneg(t: SketchTable, item: int) -> int:
    """Truncate the table's estimate at zero."""
    return max(0, t.query(item))
