# CountMin and CountSketch on a Zipfian stream.
# Run with: python demos/01_countmin_vs_countsketch.py
import numpy as np

from layersketch import Mode, SketchTable, ZipfSpec, gen_zipf, weighted_error

# item i shows up round(n / i) times, so item 1 is the heaviest
stream, gt = gen_zipf(ZipfSpec(n=10_000, scale=10_000, shuffle=True, seed=1))
print("updates:", len(stream), " distinct items:", gt.distinct, " N:", gt.N)

# same budget for both: 3 rows x 200 columns
cm = SketchTable.from_space(3, 600, Mode.COUNT_MIN, seed=7)
cs = SketchTable.from_space(3, 600, Mode.COUNT_SKETCH, seed=7)
cm.update_many(stream.items, stream.deltas)
cs.update_many(stream.items, stream.deltas)

for item in [1, 2, 10, 100, 5000]:
    print(f"item {item:>5}: true {gt.freq[item]:>6}  cm {cm.query(item):>6}  cs {cs.query(item):>6}")

# CM never undercounts on insertion-only streams, CS is unbiased but noisy
cm_est = cm.query_many(gt.items)
cs_est = cs.query_many(gt.items)
print("cm overestimates everywhere:", bool((cm_est >= gt.counts).all()))
print("cs mean signed error:", float(np.mean(cs_est - gt.counts)))

# weighted error: every item weighted by its own frequency
print("weighted error  cm:", round(weighted_error(gt, cm_est), 1),
      " cs:", round(weighted_error(gt, cs_est), 1),
      " cs >= 0:", round(weighted_error(gt, cs.query_nonneg_many(gt.items)), 1))

# linear sketches handle deletions: remove every copy of item 1
cs.update(1, -gt.freq[1])
print("item 1 after deletion:", cs.query(1))
