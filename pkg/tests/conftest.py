import numpy as np
import pytest


def replay_counters(table, freq):
    """Counters recomputed from the definition: C[l, b] = sum_j [h_l(j) = b] s_l(j) f_j."""
    out = np.zeros((table.rows, table.cols), dtype=object)
    for r in range(table.rows):
        h = table.row_hashes[r]
        for item, f in freq.items():
            s = 1 if table.row_signs is None else table.row_signs[r](item)
            out[r, h(item)] += s * f
    return out


def random_stream(rng, n_items, length, deletions=False):
    items = rng.integers(0, n_items, length).astype(np.uint64)
    if deletions:
        deltas = rng.integers(-5, 6, length)
    else:
        deltas = rng.integers(1, 6, length)
    return items, deltas.astype(np.int64)


def freq_of(items, deltas):
    f = {}
    for i, d in zip(items.tolist(), deltas.tolist()):
        f[i] = f.get(i, 0) + d
    return f


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE: list[str] = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
