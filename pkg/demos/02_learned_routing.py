# Routing predicted heavy hitters to exact counters.
# Run with: python demos/02_learned_routing.py
import numpy as np

from layersketch import (HeavyHitterOracle, Mode, ZipfSpec, build_oracle, gen_zipf,
                         learned_sketch, weighted_error)

stream, gt = gen_zipf(ZipfSpec(10_000, 10_000, shuffle=True, seed=2))
B = 600

# a perfect oracle knows the top B/2 items
oracle = build_oracle(gt, B // 2)
sk = learned_sketch(oracle, B, rows=3, mode=Mode.COUNT_SKETCH, seed=3)
sk.update_many(stream.items, stream.deltas)
print("exact table holds", len(sk.exact.entries), "items; base sketch has",
      sk.base.space, "counters")
# each item is classified once, on first sight
print("oracle queries:", oracle.queries_made, "for", gt.distinct, "distinct items")

est = sk.query_many(gt.items)
top = gt.top(B // 2)
print("error on predicted heavy items:", int(np.abs(sk.query_many(top) - gt.count_of(top)).sum()))
print("weighted error, perfect oracle:", round(weighted_error(gt, est), 1))

# a noisy oracle flips each answer with probability 0.2
for p in [0.0, 0.1, 0.2, 0.4]:
    noisy = HeavyHitterOracle(gt.top(B // 2).tolist(), "noisy", flip_prob=p, seed=4)
    s = learned_sketch(noisy, B, seed=3)
    s.update_many(stream.items, stream.deltas)
    print(f"flip {p:.1f}: weighted error {weighted_error(gt, s.query_many(gt.items)):8.1f}"
          f"  (predicted heavy, table full: {s.exact.rejected_heavy})")
