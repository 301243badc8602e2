import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from layersketch.sketches import InvalidConfigurationError
from layersketch.streams import ZipfSpec, gen_zipf
from layersketch.tail import BasicTailSketch, TailEstimator, exact_tail_norm, tail_finalize


def _brute(sketch, freq):
    # (1/c) * sum_j (sum_{i: h(i) = 0} f_i s_j(i))^2 from the definition
    total = 0
    for s in sketch.signs:
        z = sum(f * s(i) for i, f in freq.items() if sketch.h(i) == 0)
        total += z * z
    return total / sketch.n_signs


def test_items_outside_tracked_bucket_are_ignored():
    t = BasicTailSketch(50, seed=3)
    item = next(i for i in range(1000) if t.h(i) != 0)
    t.update(item, 10)
    assert not t.acc.any()


def test_single_tracked_item_gives_square():
    t = BasicTailSketch(50, seed=3)
    item = next(i for i in range(1000) if t.h(i) == 0)
    t.update(item, 7)
    assert set(np.abs(t.acc).tolist()) == {7}
    assert t.value() == 49.0


def test_matches_brute_force(rng):
    for seed in range(10):
        t = BasicTailSketch(4, seed=seed, n_signs=8)
        items = rng.integers(0, 32, 120)
        deltas = rng.integers(-4, 9, 120)
        t.update_many(items, deltas)
        freq = {}
        for i, d in zip(items.tolist(), deltas.tolist()):
            freq[i] = freq.get(i, 0) + d
        assert t.value() == _brute(t, freq)


def test_batch_equals_sequential(rng):
    items = rng.integers(0, 500, 2000)
    deltas = rng.integers(1, 4, 2000)
    a, b = TailEstimator(6, 5, seed=2), TailEstimator(6, 5, seed=2)
    a.update_many(items, deltas)
    for i, d in zip(items.tolist(), deltas.tolist()):
        b.update(i, d)
    assert a.values() == b.values()


def test_finalize_rank():
    assert tail_finalize([1.0, 4.0, 9.0]) == 9.0
    assert tail_finalize([5.0, 1.0, 3.0, 2.0, 4.0, 6.0]) == 5.0
    with pytest.raises(InvalidConfigurationError):
        tail_finalize([1.0, 2.0])
    with pytest.raises(InvalidConfigurationError):
        TailEstimator(2, 10)


def test_zero_stream():
    assert TailEstimator(9, 10, seed=1).finalize() == 0.0


def test_exact_tail_norm():
    assert exact_tail_norm([4, 3, 2, 1], 2) == 5
    assert exact_tail_norm([4, 3, 2, 1], 0) == 30
    assert exact_tail_norm([4, 3, 2, 1], 4) == 0
    assert exact_tail_norm([4, 3, 2, 1], 10) == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 200), st.integers(-5, 5)), min_size=1, max_size=80),
       st.integers(-4, 4), st.integers(0, 2**32))
def test_scale_equivariance(pairs, a, seed):
    items = np.array([p[0] for p in pairs])
    deltas = np.array([p[1] for p in pairs])
    x, y = TailEstimator(6, 3, seed), TailEstimator(6, 3, seed)
    x.update_many(items, deltas)
    y.update_many(items, a * deltas)
    assert y.values() == [a * a * v for v in x.values()]
    assert y.finalize() == a * a * x.finalize()


def test_deterministic_replay():
    stream, _ = gen_zipf(ZipfSpec(500, 500, shuffle=True, seed=4))
    runs = []
    for _ in range(2):
        t = TailEstimator(12, 8, seed=99)
        t.update_many(stream.items, stream.deltas)
        runs.append(t.finalize())
    assert runs[0] == runs[1]


def test_permutation_invariance(rng):
    _, gt = gen_zipf(ZipfSpec(2000, 2000))
    relabeled = rng.permutation(10**6)[: gt.distinct] + 7
    a, b = [], []
    for seed in range(100):
        t = TailEstimator(9, 10, seed=seed)
        t.update_many(gt.items, gt.counts)
        a.append(t.finalize())
        t = TailEstimator(9, 10, seed=10_000 + seed)
        t.update_many(relabeled, gt.counts)
        b.append(t.finalize())
    assert stats.ks_2samp(a, b).pvalue > 0.01


def tail_band(counts, b_prime):
    lo = exact_tail_norm(counts, 3 * b_prime) / (6 * b_prime)
    hi = 9 * exact_tail_norm(counts, b_prime // 10) / b_prime
    return lo, hi


def test_sandwich_band():
    _, gt = gen_zipf(ZipfSpec(10_000, 10_000))
    lo, hi = tail_band(gt.counts, 20)
    inside = 0
    for seed in range(50):
        t = TailEstimator(60, 20, seed=seed)
        t.update_many(gt.items, gt.counts)
        inside += lo <= t.finalize() <= hi
    assert inside >= 45
