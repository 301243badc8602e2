"""Synthetic Zipfian streams, trace ingestion and exact ground truth."""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .hashing import fingerprint64
from .learned import HeavyHitterOracle, OracleKind
from .sketches import StreamUpdate


class StreamFormatError(ValueError):
    pass


class StreamFormat(str, enum.Enum):
    PAIRS = "pairs"
    ITEMS = "items"


@dataclass(frozen=True)
class ZipfSpec:
    """Rank ``i`` (1-based, also its item id) gets ``round(scale / i**exponent)`` units."""

    n: int
    scale: float
    exponent: float = 1.0
    shuffle: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.scale <= 0 or self.exponent <= 0:
            raise ValueError("scale and exponent must be positive")


@dataclass
class Stream:
    """An ordered sequence of ``(item, delta)`` updates held as two arrays."""

    items: np.ndarray
    deltas: np.ndarray

    def __post_init__(self):
        self.items = np.asarray(self.items, dtype=np.uint64)
        self.deltas = np.asarray(self.deltas, dtype=np.int64)

    def __len__(self):
        return int(self.items.size)

    def __iter__(self) -> Iterator[StreamUpdate]:
        for i, d in zip(self.items.tolist(), self.deltas.tolist()):
            yield StreamUpdate(i, d)

    def aggregated(self) -> "Stream":
        """One update per distinct item, in order of first appearance.

        Linear sketches end in the same state as with the full stream.
        """
        uniq, first, inv = np.unique(self.items, return_index=True, return_inverse=True)
        sums = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(sums, inv, self.deltas)
        order = np.argsort(first, kind="stable")
        return Stream(uniq[order], sums[order])


@dataclass
class GroundTruth:
    items: np.ndarray
    counts: np.ndarray
    sorted_ranks: np.ndarray = field(init=False)

    def __post_init__(self):
        self.items = np.asarray(self.items, dtype=np.uint64)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        # descending count, ties by smaller id
        order = np.lexsort((self.items, -self.counts))
        self.sorted_ranks = self.items[order]

    @classmethod
    def from_stream(cls, stream: Stream) -> "GroundTruth":
        uniq, inv = np.unique(stream.items, return_inverse=True)
        counts = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(counts, inv, stream.deltas)
        return cls(uniq, counts)

    @property
    def N(self) -> int:
        return int(self.counts.sum())

    @property
    def distinct(self) -> int:
        return int(self.items.size)

    @property
    def freq(self) -> dict[int, int]:
        return dict(zip(self.items.tolist(), self.counts.tolist()))

    def top(self, h: int) -> np.ndarray:
        return self.sorted_ranks[:h]

    def count_of(self, items) -> np.ndarray:
        items = np.asarray(items, dtype=np.uint64)
        order = np.argsort(self.items)
        keys = self.items[order]
        pos = np.searchsorted(keys, items).clip(0, max(keys.size - 1, 0))
        out = np.zeros(items.size, dtype=np.int64)
        if keys.size:
            hit = keys[pos] == items
            out[hit] = self.counts[order][pos[hit]]
        return out

    def write_csv(self, path) -> None:
        order = np.argsort(self.items)
        lines = ["item,count"]
        lines += [f"{i},{c}" for i, c in zip(self.items[order].tolist(),
                                              self.counts[order].tolist())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def zipf_counts(spec: ZipfSpec) -> np.ndarray:
    """Integer counts for ranks 1..n, rounded half up."""
    ranks = np.arange(1, spec.n + 1, dtype=np.int64)
    if spec.exponent == 1.0 and float(spec.scale).is_integer():
        a = int(spec.scale)
        return (2 * a + ranks) // (2 * ranks)
    return np.floor(spec.scale / ranks.astype(np.float64) ** spec.exponent + 0.5).astype(np.int64)


def gen_zipf(spec: ZipfSpec) -> tuple[Stream, GroundTruth]:
    """Unit-update stream: all copies of rank 1, then rank 2, ..., optionally shuffled."""
    counts = zipf_counts(spec)
    ids = np.arange(1, spec.n + 1, dtype=np.uint64)
    if counts.sum() == 0:
        warnings.warn("Zipf parameters round every frequency to 0; so the stream is empty", stacklevel=2)
    items = np.repeat(ids, counts)
    if spec.shuffle:
        items = np.random.default_rng(spec.seed).permutation(items)
    keep = counts > 0
    gt = GroundTruth(ids[keep], counts[keep])
    return Stream(items, np.ones(items.size, dtype=np.int64)), gt


def write_stream(stream: Stream, path) -> None:
    """Pairs format: ``item delta`` per line, LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for lo in range(0, len(stream), 1 << 16):
            chunk = zip(stream.items[lo:lo + (1 << 16)].tolist(),
                        stream.deltas[lo:lo + (1 << 16)].tolist())
            fh.write("".join(f"{i} {d}\n" for i, d in chunk))


def ingest(path, fmt: StreamFormat | str = StreamFormat.PAIRS) -> tuple[Stream, GroundTruth]:
    """Read a stream file.  Blank lines are skipped; anything else malformed raises."""
    fmt = StreamFormat(fmt)
    items: list[int] = []
    deltas: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if fmt is StreamFormat.ITEMS:
                items.append(fingerprint64(line))
                continue
            parts = line.split()
            if len(parts) != 2:
                raise StreamFormatError(f"{path}:{lineno}: expected 'item delta', got {line!r}")
            try:
                item, delta = int(parts[0], 10), int(parts[1], 10)
            except ValueError:
                raise StreamFormatError(f"{path}:{lineno}: non-integer field in {line!r}") from None
            if not 0 <= item < 1 << 64 or not -(1 << 63) <= delta < 1 << 63:
                raise StreamFormatError(f"{path}:{lineno}: value out of range in {line!r}")
            items.append(item)
            deltas.append(delta)
    if fmt is StreamFormat.ITEMS:
        deltas = [1] * len(items)
    stream = Stream(np.array(items, dtype=np.uint64), np.array(deltas, dtype=np.int64))
    return stream, GroundTruth.from_stream(stream)


def build_oracle(gt: GroundTruth | None, H: int = 0, kind: OracleKind | str = "perfect",
                 flip_prob: float = 0.0, seed: int = 0, path=None) -> HeavyHitterOracle:
    """Oracle whose heavy set is the top ``H`` of ``gt`` (or read from ``path`` for lookup)."""
    kind = OracleKind(kind)
    if kind is OracleKind.LOOKUP:
        if path is None:
            raise ValueError("lookup oracle needs a file path")
        return HeavyHitterOracle.from_file(path)
    if H < 0:
        raise ValueError("H must be >= 0")
    if H > gt.distinct:
        warnings.warn(f"H={H} exceeds {gt.distinct} distinct items; all are heavy",
                      stacklevel=2)
    return HeavyHitterOracle(gt.top(H).tolist(), kind, flip_prob, seed)
