"""Error measures over the support of the ground truth."""
from __future__ import annotations

import numpy as np

from .streams import GroundTruth


class UndefinedMetricError(ValueError):
    pass


def _aligned(gt: GroundTruth, estimates) -> np.ndarray:
    if isinstance(estimates, dict):
        return np.array([estimates.get(i, 0) for i in gt.items.tolist()], dtype=np.float64)
    est = np.asarray(estimates, dtype=np.float64)
    if est.shape != gt.counts.shape:
        raise ValueError("estimate array must align with gt.items")
    return est


def weighted_error(gt: GroundTruth, estimates) -> float:
    """``(1/N) * sum_i f_i * |est_i - f_i|``; missing estimates count as 0."""
    n_total = gt.N
    if n_total == 0:
        raise UndefinedMetricError("weighted error is undefined for total weight 0")
    f = gt.counts.astype(np.float64)
    return float(np.sum(f * np.abs(_aligned(gt, estimates) - f)) / n_total)


def unweighted_error(gt: GroundTruth, estimates) -> float:
    """``sum_i |est_i - f_i|``."""
    f = gt.counts.astype(np.float64)
    return float(np.sum(np.abs(_aligned(gt, estimates) - f)))
