# Estimating the tail l2 mass, used as a distribution free threshold.
# Run with: python demos/04_tail_estimate.py
import numpy as np

from layersketch import TailEstimator, ZipfSpec, exact_tail_norm, gen_zipf

_, gt = gen_zipf(ZipfSpec(10_000, 10_000))
b = 20
values = []
for seed in range(30):
    t = TailEstimator(copies=60, buckets=b, seed=seed)
    t.update_many(gt.items, gt.counts)
    values.append(t.finalize())
values = np.array(values)

lo = exact_tail_norm(gt.counts, 3 * b) / (6 * b)
hi = 9 * exact_tail_norm(gt.counts, b // 10) / b
print("band:", round(lo), "to", round(hi))
print("estimates: min", round(values.min()), " median", round(np.median(values)),
      " max", round(values.max()))
print("inside band:", int(((values >= lo) & (values <= hi)).sum()), "of", len(values))
# the estimate is quadratic in the stream
t = TailEstimator(60, b, seed=0)
t.update_many(gt.items, 3 * gt.counts)
print("tripled stream / original:", t.finalize() / values[0])
