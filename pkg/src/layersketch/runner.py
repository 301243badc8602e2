"""Experiment runner: algorithms x spaces x trials -> error rows and CSV."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .hashing import derive_seed, fingerprint64
from .layered import LayeredSketch, LearnedLayered, ParsimoniousLayered, PracticalSketch
from .learned import HeavyHitterOracle, OracleKind, learned_sketch
from .metrics import unweighted_error, weighted_error
from .sketches import InvalidConfigurationError, Mode, SketchTable
from .streams import GroundTruth, Stream, StreamFormat, ZipfSpec, build_oracle, gen_zipf, ingest

CSV_COLUMNS = ["algorithm", "space", "trial", "seed", "weighted_error",
               "unweighted_error", "oracle_queries", "wall_time_ms"]

ALGORITHMS = ("cm", "cs", "cm-nonneg", "cs-nonneg", "learned-cm", "learned-cs",
              "layered", "learned-layered", "parsimonious", "practical")
LEARNED = {"learned-cm", "learned-cs", "learned-layered", "parsimonious"}


@dataclass(frozen=True)
class AlgoSpec:
    """One algorithm column of an experiment, with its knobs.

    ``oracle`` is ``"perfect"``, ``"noisy:<p>"`` or ``"lookup:<path>"``;
    ``hh`` defaults to half the space.
    """

    name: str
    rows: int = 3
    c_thr: float = 1.0
    oracle: str = "perfect"
    hh: int | None = None
    gamma: float = 1.0
    anytime: bool = False
    nonneg: bool = False
    worst_case: bool = False
    label: str | None = None

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.name!r}; choose from {', '.join(ALGORITHMS)}")

    @property
    def display(self) -> str:
        if self.label:
            return self.label
        if self.nonneg and not self.name.endswith("-nonneg"):
            return f"{self.name}-nonneg"
        return self.name

    @property
    def truncates(self) -> bool:
        return self.nonneg or self.name.endswith("-nonneg")


@dataclass
class ExperimentPlan:
    algorithms: list[AlgoSpec]
    spaces: list[int]
    dataset: ZipfSpec | str | Path
    fmt: StreamFormat | str = StreamFormat.PAIRS
    trials: int = 10
    base_seed: int = 0
    record_time: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.spaces:
            raise ValueError("space grid must be non-empty")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        labels = [a.display for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate algorithm labels: {labels}")


@dataclass
class ErrorReport:
    algorithm: str
    space: int
    trial: int
    seed: int
    weighted_error: float
    unweighted_error: float
    oracle_queries: int = 0
    wall_time_ms: float = 0.0
    error: str | None = field(default=None, compare=False)

    def row(self) -> list[str]:
        return [self.algorithm, str(self.space), str(self.trial), str(self.seed),
                repr(float(self.weighted_error)), repr(float(self.unweighted_error)),
                str(self.oracle_queries), repr(float(self.wall_time_ms))]


def cell_seed(base_seed: int, label: str, space: int, trial: int) -> int:
    s = derive_seed(base_seed, fingerprint64(label))
    return derive_seed(derive_seed(s, space), trial)


def load_dataset(plan: ExperimentPlan) -> tuple[Stream, GroundTruth, int]:
    if isinstance(plan.dataset, ZipfSpec):
        stream, gt = gen_zipf(plan.dataset)
        return stream, gt, plan.dataset.n
    stream, gt = ingest(plan.dataset, plan.fmt)
    return stream, gt, gt.distinct


def _oracle(algo: AlgoSpec, gt: GroundTruth, space: int, seed: int) -> HeavyHitterOracle:
    kind, _, arg = algo.oracle.partition(":")
    h = space // 2 if algo.hh is None else algo.hh
    if kind == "perfect":
        return build_oracle(gt, h, OracleKind.PERFECT)
    if kind == "noisy":
        return build_oracle(gt, h, OracleKind.NOISY, float(arg), seed=derive_seed(seed, 17))
    if kind == "lookup":
        return build_oracle(None, kind=OracleKind.LOOKUP, path=arg)
    raise ValueError(f"unknown oracle {algo.oracle!r}")


def build_algorithm(algo: AlgoSpec, space: int, seed: int, gt: GroundTruth, n_domain: int):
    """Fresh sketch instance for one cell (oracle, if any, is attached)."""
    name = algo.name
    if name in ("cm", "cm-nonneg"):
        return SketchTable.from_space(algo.rows, space, Mode.COUNT_MIN, seed)
    if name in ("cs", "cs-nonneg"):
        return SketchTable.from_space(algo.rows, space, Mode.COUNT_SKETCH, seed)
    if name == "practical":
        return PracticalSketch(n_domain, space, algo.rows, algo.c_thr, seed)
    if name == "layered":
        return LayeredSketch(n_domain, space, algo.rows, seed, algo.c_thr,
                             worst_case=algo.worst_case)
    oracle = _oracle(algo, gt, space, seed)
    if name == "learned-cm":
        return learned_sketch(oracle, space, algo.rows, Mode.COUNT_MIN, seed)
    if name == "learned-cs":
        return learned_sketch(oracle, space, algo.rows, Mode.COUNT_SKETCH, seed)
    if name == "learned-layered":
        return LearnedLayered(oracle, n_domain, space, algo.rows, seed, algo.c_thr,
                              worst_case=algo.worst_case)
    weight = None if algo.anytime else int(np.abs(gt.counts).sum())
    return ParsimoniousLayered(oracle, n_domain, space, algo.gamma, weight, algo.rows,
                               seed, algo.c_thr, worst_case=algo.worst_case)


def run_cell(algo: AlgoSpec, space: int, trial: int, seed: int, stream: Stream,
             compact: Stream, gt: GroundTruth, n_domain: int,
             record_time: bool = False) -> ErrorReport:
    t0 = time.perf_counter()
    try:
        sketch = build_algorithm(algo, space, seed, gt, n_domain)
    except InvalidConfigurationError as exc:
        return ErrorReport(algo.display, space, trial, seed, math.nan, math.nan, 0, 0.0,
                           error=str(exc))
    if algo.name == "parsimonious":
        sketch.update_many(stream.items, stream.deltas)
    else:
        sketch.update_many(compact.items, compact.deltas)
    # query in ingest order (hash work is cached per item array), then align to gt
    est = np.empty(gt.items.size, dtype=np.int64)
    order = np.argsort(gt.items)
    slots = order[np.searchsorted(gt.items, compact.items, sorter=order)]
    est[slots] = sketch.query_many(compact.items)
    if algo.truncates:
        est = np.maximum(est, 0)
    elapsed = (time.perf_counter() - t0) * 1000.0 if record_time else 0.0
    queries = sketch.oracle.queries_made if algo.name in LEARNED else 0
    return ErrorReport(algo.display, space, trial, seed, weighted_error(gt, est),
                       unweighted_error(gt, est), queries, elapsed)


def run_experiment(plan: ExperimentPlan, out=None, data=None) -> list[ErrorReport]:
    """Run every (algorithm, space, trial) cell; optionally write the CSV to ``out``.

    ``data`` may carry a preloaded ``(stream, gt, n_domain)`` triple.
    """
    stream, gt, n_domain = data if data is not None else load_dataset(plan)
    compact = stream.aggregated()
    reports = []
    for algo in plan.algorithms:
        for space in plan.spaces:
            for trial in range(plan.trials):
                seed = cell_seed(plan.base_seed, algo.display, space, trial)
                reports.append(run_cell(algo, space, trial, seed, stream, compact, gt,
                                        n_domain, plan.record_time))
    reports.sort(key=lambda r: (r.algorithm, r.space, r.trial))
    if out is not None:
        write_csv(reports, out)
    return reports


def format_csv(reports, extra: dict[str, list] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    prefix = list(extra) if extra else []
    w.writerow(prefix + CSV_COLUMNS)
    for k, r in enumerate(reports):
        w.writerow([str(extra[c][k]) for c in prefix] + r.row())
    return buf.getvalue()


def write_csv(reports, path, extra=None) -> None:
    Path(path).write_text(format_csv(reports, extra), encoding="utf-8", newline="\n")


def run_longitudinal(plan: ExperimentPlan, paths, out=None):
    """Run ``plan`` once per stream file; rows gain a leading ``stream`` index."""
    rows, index = [], []
    for k, p in enumerate(paths):
        sub = replace(plan, dataset=p)
        reps = run_experiment(sub)
        rows += reps
        index += [k] * len(reps)
    if out is not None:
        write_csv(rows, out, {"stream": index})
    return rows, index


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def summarize(reports, metric: str = "weighted_error") -> dict[tuple[str, int], tuple[float, float]]:
    """Mean and sample std of ``metric`` per (algorithm, space), skipping failed cells."""
    groups: dict[tuple[str, int], list[float]] = {}
    for r in reports:
        v = getattr(r, metric)
        if not math.isnan(v):
            groups.setdefault((r.algorithm, r.space), []).append(v)
    return {k: (float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0)
            for k, v in sorted(groups.items())}
