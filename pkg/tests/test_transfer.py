import pytest

from brickcount import fixtures
from brickcount.flat import count_flat
from brickcount.transfer import BudgetExceeded, canon, tm_count, tm_count_python, tm_run


def test_canon_relabels_by_first_occurrence():
    assert canon(bytes([0, 3, 3, 0, 1, 2, 3])) == bytes([0, 1, 1, 0, 2, 3, 1])
    assert canon(bytes([0, 0])) == bytes([0, 0])


@pytest.mark.parametrize("w", [2, 3, 4, 5])
def test_native_and_python_engines_agree(w):
    n = {2: 9, 3: 7, 4: 6, 5: 5}[w]
    assert tm_count(w, n, engine="native") == tm_count(w, n, engine="python")


def test_mirror_merging_does_not_change_counts():
    a = tm_count_python(3, 6).counts
    b = tm_count_python(3, 6, mirror=False).counts
    assert a == b


def test_pruning_does_not_change_counts():
    assert tm_count_python(2, 7, pruning=False).counts == tm_count_python(2, 7).counts


@pytest.mark.parametrize("w,n", [(w, n) for w in range(2, 7) for n in range(1, 7)])
def test_against_explicit_search(w, n):
    assert tm_count(w, n)[n - 1] == count_flat(w, n, engine="native")


def test_width_one_is_a_column():
    assert tm_count(1, 5) == [1] * 5


def test_reference_prefix():
    assert tm_count(2, 14) == fixtures.flat_counts(2)[:14]


def test_memory_budget_reports_exact_prefix():
    with pytest.raises(BudgetExceeded) as info:
        tm_run(3, 12, memory_bytes=2_000_000)
    e = info.value
    assert e.partial == fixtures.flat_counts(3)[:e.completed]


def test_time_budget():
    with pytest.raises(BudgetExceeded, match="time budget"):
        tm_run(4, 12, time_budget=0.2)


def test_trace_records_steps():
    r = tm_run(2, 4, trace=True)
    assert r.trace and r.peak_states == max(s for _, _, s in r.trace)
