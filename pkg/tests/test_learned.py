import numpy as np
import pytest

from conftest import random_stream, replay_counters, freq_of
from layersketch.learned import (ExactTable, HeavyHitterOracle, OracleKind, always_false_oracle,
                                 learned_query, learned_sketch, learned_update, predict,
                                 read_lookup_file)
from layersketch.sketches import Mode, SketchTable
from layersketch.streams import ZipfSpec, build_oracle, gen_zipf


@pytest.fixture
def zipf():
    return gen_zipf(ZipfSpec(1000, 1000))


def test_perfect_oracle_on_zipf(zipf):
    _, gt = zipf
    o = build_oracle(gt, 4)
    assert [predict(o, i) for i in (1, 2, 3, 4, 5)] == [True] * 4 + [False]
    assert o.queries_made == 5


def test_noisy_with_zero_flip_matches_perfect(zipf):
    _, gt = zipf
    perfect = build_oracle(gt, 50)
    noisy = build_oracle(gt, 50, OracleKind.NOISY, 0.0, seed=3)
    items = np.arange(1, 10_001)
    assert (perfect.predict_many(items) == noisy.predict_many(items)).all()


def test_noisy_flip_rate(zipf):
    _, gt = zipf
    p, n = 0.1, 100_000
    noisy = build_oracle(gt, 50, OracleKind.NOISY, p, seed=11)
    items = np.arange(1, n + 1) % 1000 + 1
    truth = np.isin(items, gt.top(50).astype(np.int64))
    flips = (noisy.predict_many(items) != truth).mean()
    assert abs(flips - p) < 3 * np.sqrt(p * (1 - p) / n)
    assert noisy.queries_made == n


def test_noisy_batch_equals_scalar():
    a = HeavyHitterOracle([1, 2], OracleKind.NOISY, 0.3, seed=5)
    b = HeavyHitterOracle([1, 2], OracleKind.NOISY, 0.3, seed=5)
    items = list(range(50))
    assert a.predict_many(items).tolist() == [b.predict(i) for i in items]


def test_exact_table_capacity():
    t = ExactTable(2)
    assert t.admit(1) and t.admit(2) and t.admit(1)
    assert not t.admit(3)
    assert t.rejected_heavy == 1 and len(t) == 2


def test_heavy_only_stream_leaves_base_empty(zipf):
    _, gt = zipf
    s = learned_sketch(build_oracle(gt, 10), 60, seed=1)
    for item in gt.top(10).tolist():
        learned_update(s, item, 7)
    assert not s.base.counters.any()
    assert all(learned_query(s, i) == 7 for i in gt.top(10).tolist())


def test_always_false_oracle_equals_base(rng):
    items, deltas = random_stream(rng, 300, 1000)
    s = learned_sketch(always_false_oracle(), 60, seed=9)
    s.update_many(items, deltas)
    base = SketchTable(3, 10, Mode.COUNT_SKETCH, s.base.seed)
    base.update_many(items, deltas)
    probe = np.arange(300, dtype=np.uint64)
    assert (s.query_many(probe) == base.query_many(probe)).all()
    assert learned_query(learned_sketch(always_false_oracle(), 60), 1234567) == 0


def test_mixed_stream_routing_replay(rng):
    items, deltas = random_stream(rng, 40, 400)
    heavy = [0, 1, 2, 3, 4]
    s = learned_sketch(HeavyHitterOracle(heavy), 12, rows=3, seed=4)
    s.update_many(items, deltas)
    f = freq_of(items, deltas)
    assert s.exact.entries == {i: f[i] for i in heavy if i in f}
    light = {i: v for i, v in f.items() if i not in heavy}
    assert (s.base.counters == replay_counters(s.base, light)).all()
    # untracked item answers come from the base replayed on the light substream
    ref = SketchTable(3, s.base.cols, Mode.COUNT_SKETCH, s.base.seed)
    ref.update_many(np.array(list(light), dtype=np.uint64), np.array(list(light.values())))
    for i in light:
        assert learned_query(s, i) == ref.query(i)


def test_perfect_oracle_gives_zero_error_on_top_items(zipf):
    stream, gt = zipf
    s = learned_sketch(build_oracle(gt, 50), 100, seed=2)
    s.update_many(stream.items, stream.deltas)
    top = gt.top(50)
    assert (s.query_many(top) == gt.count_of(top)).all()
    assert s.space <= 100


def test_overflowing_predictions_are_rejected_first_come():
    o = HeavyHitterOracle([5, 6, 7])
    s = learned_sketch(o, 4, rows=1)
    for item in [7, 6, 5, 7, 5]:
        s.update(item, 1)
    assert set(s.exact.entries) == {7, 6}
    assert s.exact.rejected_heavy == 1
    assert o.queries_made == 3  # each item classified once, then pinned


def test_batch_and_sequential_learned_agree(rng):
    items, deltas = random_stream(rng, 100, 700)
    mk = lambda: learned_sketch(HeavyHitterOracle(range(0, 100, 3), OracleKind.NOISY, 0.2, 7),
                                20, rows=3, seed=3)
    a, b = mk(), mk()
    a.update_many(items, deltas)
    for i, d in zip(items.tolist(), deltas.tolist()):
        b.update(i, d)
    assert a.exact.entries == b.exact.entries
    assert (a.base.counters == b.base.counters).all()
    assert a.oracle.queries_made == b.oracle.queries_made


def test_space_budget_respected():
    for b in (10, 11, 300, 301):
        s = learned_sketch(always_false_oracle(), b)
        assert s.exact.capacity + s.base.space <= b


def test_lookup_file(tmp_path):
    p = tmp_path / "heavy.txt"
    p.write_text("5\n7\n5\n\n12\n")
    assert read_lookup_file(p) == [5, 7, 12]
    o = HeavyHitterOracle.from_file(p)
    assert o.kind is OracleKind.LOOKUP and o.predict(7) and not o.predict(8)
    p.write_text("5\nabc\n")
    with pytest.raises(ValueError, match=":2:"):
        read_lookup_file(p)
