import pytest
from hypothesis import given, settings, strategies as st

from brickcount import fixtures
from brickcount.flat import (
    FlatStructure, ResourceLimitExceeded, count_flat, enumerate_flat, is_pyramid, offsets, validate,
)

ALL_SMALL = {(w, n): list(enumerate_flat(w, n)) for w in (2, 3, 4) for n in range(1, 6)}


def test_small_counts_by_hand():
    # two tiles of width w overlap in 2w - 1 relative positions
    for w in range(1, 7):
        assert count_flat(w, 2) == 2 * w - 1
    assert count_flat(2, 3) == 11


@pytest.mark.parametrize("w,n", sorted(ALL_SMALL))
def test_enumeration_is_valid_distinct_and_counted(w, n):
    out = ALL_SMALL[(w, n)]
    assert all(validate(s) == [] for s in out)
    assert len(set(out)) == len(out)
    assert len(out) == fixtures.flat_counts(w)[n - 1]


@pytest.mark.parametrize("w,n", [(2, 7), (3, 6), (5, 4)])
def test_python_and_native_search_agree(w, n):
    assert count_flat(w, n, engine="python") == count_flat(w, n, engine="native")


def test_cap_stops_search():
    with pytest.raises(ResourceLimitExceeded):
        count_flat(3, 7, cap=100)
    with pytest.raises(ResourceLimitExceeded):
        count_flat(3, 7, cap=100, engine="native")


def test_validator_flags_broken_structures():
    assert "not connected" in validate(FlatStructure(2, ((0, 0), (2, 0))))
    assert any("overlap" in p for p in validate(FlatStructure(3, ((0, 0), (0, 2), (1, 0)))))
    assert validate(FlatStructure(2, ((0, 0), (0, 2), (1, 1)))) == []


def test_line_round_trip():
    s = FlatStructure.from_tiles(3, [(0, 0), (1, -2), (1, 1), (2, 0)])
    assert FlatStructure.from_line(s.to_line()) == s
    with pytest.raises(ValueError):
        FlatStructure.from_line("w=3 tiles=")


def test_offsets_and_pyramids():
    s = FlatStructure.from_tiles(2, [(0, 0), (1, -1), (1, 1)])
    assert offsets(s) == (0, -1, 1)
    assert is_pyramid(s)
    assert not is_pyramid(FlatStructure.from_tiles(2, [(0, 0), (0, 2), (1, 1)]))


structures = st.sampled_from(ALL_SMALL[(3, 5)] + ALL_SMALL[(4, 4)])


@settings(max_examples=200)
@given(structures, st.integers(-20, 20), st.integers(-20, 20), st.randoms())
def test_translation_invariant_canonical_form(s, dr, dc, rnd):
    moved = [(r + dr, c + dc) for r, c in s.tiles]
    rnd.shuffle(moved)
    assert FlatStructure.from_tiles(s.w, moved) == s
