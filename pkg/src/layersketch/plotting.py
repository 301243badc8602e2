"""Static SVG plots of experiment CSVs (space sweeps and longitudinal runs)."""
from __future__ import annotations

import io
import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .runner import CSV_COLUMNS, read_csv  # noqa: E402


class CsvSchemaError(ValueError):
    pass


_RC = {"svg.hashsalt": "layersketch", "svg.fonttype": "none", "path.simplify": False}


def _check(rows, header, needed):
    missing = [c for c in needed if c not in header]
    if missing:
        raise CsvSchemaError(f"CSV lacks required columns: {', '.join(missing)}")


def _header(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    return first.split(",") if first else []


def _series(rows, xkey, metric):
    acc = defaultdict(lambda: defaultdict(list))
    for r in rows:
        v = float(r[metric])
        if not math.isnan(v):
            acc[r["algorithm"]][int(r[xkey])].append(v)
    out = {}
    for algo in sorted(acc):
        xs = sorted(acc[algo])
        means = np.array([np.mean(acc[algo][x]) for x in xs])
        stds = np.array([np.std(acc[algo][x], ddof=1) if len(acc[algo][x]) > 1 else 0.0
                         for x in xs])
        out[algo] = (np.array(xs), means, stds, [len(acc[algo][x]) for x in xs])
    return out


def emit_plot(csv_path, kind: str = "space", out=None, metric: str = "weighted_error",
              space: int | None = None) -> str:
    """Render ``csv_path`` to SVG text (also written to ``out`` if given).

    ``kind="space"``: mean error against space with a +-1 std band per
    algorithm.  ``kind="longitudinal"``: mean error against stream index at
    one space (the only one present unless ``space`` is given).
    """
    header = _header(csv_path)
    rows = read_csv(csv_path)
    if kind == "space":
        _check(rows, header, CSV_COLUMNS)
        xkey, xlabel = "space", "space (counters)"
    elif kind == "longitudinal":
        _check(rows, header, ["stream"] + CSV_COLUMNS)
        spaces = sorted({int(r["space"]) for r in rows})
        if space is None and len(spaces) > 1:
            raise ValueError(f"several spaces in CSV {spaces}; pick one")
        if space is not None:
            rows = [r for r in rows if int(r["space"]) == space]
        xkey, xlabel = "stream", "stream index"
    else:
        raise ValueError(f"unknown plot kind {kind!r}")

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        for algo, (xs, mean, std, counts) in _series(rows, xkey, metric).items():
            line, = ax.plot(xs, mean, marker="o", label=algo, gid=f"series-{algo}")
            if len(xs) > 1 and any(c > 1 for c in counts):
                ax.fill_between(xs, mean - std, mean + std, alpha=0.2,
                                color=line.get_color(), linewidth=0, gid=f"band-{algo}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(metric.replace("_", " "))
        if rows and kind == "space":
            ax.set_xscale("log")
            ax.set_yscale("log")
        if rows:
            ax.legend(fontsize="small")
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    svg = buf.getvalue()
    if out is not None:
        Path(out).write_text(svg, encoding="utf-8", newline="\n")
    return svg
