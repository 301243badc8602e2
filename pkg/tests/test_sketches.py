import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import freq_of, random_stream, replay_counters
from layersketch.sketches import (CounterOverflowWarning, InvalidConfigurationError, Mode,
                                  SketchTable, cm_query, cm_update, count_min, count_sketch,
                                  cs_query, cs_update, query_nonneg)

streams = st.lists(st.tuples(st.integers(0, 63), st.integers(-20, 20)), max_size=60)


def _feed(t, pairs):
    for i, d in pairs:
        t.update(i, d)


def test_cm_single_update_touches_one_counter_per_row():
    t = SketchTable(3, 16, Mode.COUNT_MIN, seed=1)
    cm_update(t, 7, 5)
    assert np.count_nonzero(t.counters) == 3
    assert set(t.counters[t.counters != 0].tolist()) == {5}
    cm_update(t, 7, 3)
    assert set(t.counters[t.counters != 0].tolist()) == {8}


def test_cm_replay_small_instance():
    t = SketchTable(2, 4, Mode.COUNT_MIN, seed=123)
    freq = {i: i + 1 for i in range(8)}
    for i, f in freq.items():
        cm_update(t, i, f)
    assert (t.counters == replay_counters(t, freq)).all()


def test_cm_query_basics(rng):
    t = count_min(3, 30, seed=4)
    assert cm_query(t, 12) == 0
    cm_update(t, 12, 5)
    assert cm_query(t, 12) == 5
    items, deltas = random_stream(rng, 1000, 100)
    t = count_min(3, 30, seed=5)
    t.update_many(items, deltas)
    f = freq_of(items, deltas)
    assert all(cm_query(t, i) >= v for i, v in f.items())


def test_cs_sign_applied():
    t = SketchTable(3, 8, Mode.COUNT_SKETCH, seed=8)
    item = next(i for i in range(100) if t.row_signs[0](i) == -1)
    cs_update(t, item, 5)
    assert t.counters[0, t.row_hashes[0](item)] == -5
    assert cs_query(t, item) == 5


def test_cs_insert_then_delete_restores_state(rng):
    t = count_sketch(3, 60, seed=2)
    items, deltas = random_stream(rng, 500, 200)
    t.update_many(items, deltas)
    before = t.counters.copy()
    t.update(42, 5)
    t.update(42, -5)
    assert (t.counters == before).all()


def test_cs_replay_small_instance(rng):
    t = SketchTable(3, 8, Mode.COUNT_SKETCH, seed=77)
    items, deltas = random_stream(rng, 32, 200, deletions=True)
    t.update_many(items, deltas)
    assert (t.counters == replay_counters(t, freq_of(items, deltas))).all()


def test_cs_median_of_rows():
    t = SketchTable(3, 4, Mode.COUNT_SKETCH, seed=0)
    item = 5
    for r, v in enumerate([1, 2, 100]):
        t.counters[r, t.row_hashes[r](item)] = t.row_signs[r](item) * v
    assert cs_query(t, item) == 2
    assert t.query_many([item]).tolist() == [2]


def test_cs_even_rows_rejected_at_construction():
    with pytest.raises(InvalidConfigurationError):
        SketchTable(4, 10, Mode.COUNT_SKETCH)
    t = SketchTable(4, 10, Mode.COUNT_SKETCH, allow_even_rows=True)
    t.update(3, 9)
    assert t.query(3) == 9


def test_space_constructor():
    assert count_sketch(3, 300).cols == 100
    assert count_sketch(3, 301).cols == 100
    with pytest.raises(InvalidConfigurationError):
        count_sketch(3, 2)


def test_wrong_mode_rejected():
    with pytest.raises(InvalidConfigurationError):
        cs_query(count_min(3, 30), 1)


@pytest.mark.parametrize("under,expect", [(-3, 0), (0, 0), (17, 17)])
def test_query_nonneg(under, expect):
    t = SketchTable(1, 1, Mode.COUNT_SKETCH, seed=3)
    t.counters[0, 0] = t.row_signs[0](9) * under
    assert query_nonneg(t, 9) == expect


def test_cs_unbiased_over_seeds():
    f = {i: 200 // (i + 1) for i in range(50)}
    items = np.array(list(f), dtype=np.uint64)
    deltas = np.array(list(f.values()), dtype=np.int64)
    est = []
    for seed in range(2000):
        t = SketchTable(3, 8, Mode.COUNT_SKETCH, seed=seed)
        t.update_many(items, deltas)
        est.append(t.query(4))
    est = np.array(est, dtype=float)
    assert abs(est.mean() - f[4]) < 3 * est.std(ddof=1) / np.sqrt(est.size)


def test_batch_equals_sequential(rng):
    items, deltas = random_stream(rng, 200, 500, deletions=True)
    for mode in Mode:
        a, b = SketchTable(3, 7, mode, 9), SketchTable(3, 7, mode, 9)
        a.update_many(items, deltas)
        for i, d in zip(items.tolist(), deltas.tolist()):
            b.update(i, d)
        assert (a.counters == b.counters).all()
        assert a.total_updates == b.total_updates == 500
        probe = np.arange(200, dtype=np.uint64)
        assert a.query_many(probe).tolist() == [b.query(i) for i in range(200)]


def test_frozen_table_rejects_updates():
    t = count_sketch(3, 30)
    t.freeze()
    with pytest.raises(RuntimeError):
        t.update(1, 1)
    assert t.query(1) == 0


def test_overflow_saturates_and_warns_once():
    t = SketchTable(1, 1, Mode.COUNT_MIN)
    big = np.iinfo(np.int64).max
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t.update(1, big)
        t.update(1, 10)
        t.update(1, 10)
    assert t.overflowed
    assert t.counters[0, 0] == big
    assert sum(issubclass(w.category, CounterOverflowWarning) for w in caught) == 1


@settings(max_examples=60, deadline=None)
@given(streams, streams, st.integers(0, 2**32), st.sampled_from(list(Mode)))
def test_linearity(s1, s2, seed, mode):
    a, b, ab = (SketchTable(3, 5, mode, seed) for _ in range(3))
    _feed(a, s1)
    _feed(b, s2)
    _feed(ab, s1 + s2)
    assert (ab.counters == a.counters + b.counters).all()


@settings(max_examples=60, deadline=None)
@given(streams, st.integers(0, 2**32))
def test_cs_symmetry(pairs, seed):
    a, b = SketchTable(3, 5, Mode.COUNT_SKETCH, seed), SketchTable(3, 5, Mode.COUNT_SKETCH, seed)
    _feed(a, pairs)
    _feed(b, [(i, -d) for i, d in pairs])
    assert (b.counters == -a.counters).all()
    probe = np.arange(64, dtype=np.uint64)
    assert (b.query_many(probe) == -a.query_many(probe)).all()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 63), st.integers(1, 20)), max_size=80),
       st.integers(0, 2**32), st.integers(1, 3), st.integers(1, 8))
def test_cm_dominance_exhaustive_small(pairs, seed, rows, cols):
    t = SketchTable(rows, cols, Mode.COUNT_MIN, seed)
    _feed(t, pairs)
    f = {}
    for i, d in pairs:
        f[i] = f.get(i, 0) + d
    est = t.query_many(np.arange(64, dtype=np.uint64))
    assert all(est[i] >= f.get(i, 0) for i in range(64))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 31), st.integers(-9, 9)), max_size=60),
       st.integers(0, 2**32), st.integers(1, 3), st.integers(1, 8), st.sampled_from(list(Mode)))
def test_brute_force_equivalence(pairs, seed, rows, cols, mode):
    if mode is Mode.COUNT_SKETCH and rows == 2:
        rows = 3
    t = SketchTable(rows, cols, mode, seed)
    _feed(t, pairs)
    f = {}
    for i, d in pairs:
        f[i] = f.get(i, 0) + d
    assert (t.counters == replay_counters(t, f)).all()
