import pytest
from hypothesis import given, settings, strategies as st

from brickcount.brick3d import (
    BrickCapExceeded, canonical_form, conflicts, count_buildings, count_buildings_detail, count_fixed,
    count_symmetric, brute_force_classes, is_connected, neighbours, overlap, rotate90, rotate180,
    validate,
)

BRUTE = {n: brute_force_classes(n) for n in range(1, 4)}


def test_neighbour_and_conflict_counts():
    b = (0, 0, 1, 0)
    nb = list(neighbours(b))
    assert len(nb) == len(set(nb)) == 92
    assert all(abs(c[2] - 1) == 1 and overlap(b, c) for c in nb)
    cf = set(conflicts(b))
    assert len(cf) == 46 and b in cf


def test_validator():
    assert validate([(0, 0, 0, 0), (1, 1, 1, 1)]) == []
    assert "not connected" in validate([(0, 0, 0, 0), (0, 0, 2, 0)])
    assert any("collide" in p for p in validate([(0, 0, 0, 0), (1, 0, 0, 1), (0, 0, 1, 0)]))


def test_rotations_compose():
    b = (3, -2, 1, 0)
    r = b
    for _ in range(4):
        r = rotate90(r)
    assert r == b
    assert rotate90(rotate90(b)) == rotate180(b)
    for cx2, cy2 in [(0, 0), (1, 1), (1, 0), (0, 1)]:
        assert rotate180(rotate180(b, cx2, cy2), cx2, cy2) == b


@pytest.mark.parametrize("n", [1, 2, 3])
def test_brute_force_outputs_are_valid(n):
    for bs in BRUTE[n]:
        assert validate(bs) == [] and canonical_form(bs) == bs


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 24), (3, 1560)])
def test_counts_match_brute_force(n, expected):
    assert len(BRUTE[n]) == expected
    assert count_buildings(n) == expected


def test_burnside_parts():
    d = count_buildings_detail(3)
    assert (d.fixed, d.quarter_symmetric, d.half_symmetric) == (6152, 0, 88)
    assert count_symmetric(2, False) == 4


def test_engines_agree():
    assert count_fixed(3, engine="python") == count_fixed(3, engine="native") == 6152


def test_cap():
    with pytest.raises(BrickCapExceeded):
        count_fixed(3, engine="python", cap=10)
    with pytest.raises(BrickCapExceeded):
        count_fixed(3, engine="native", cap=10)


buildings = st.sampled_from(sorted(BRUTE[3]))


@settings(max_examples=200)
@given(buildings, st.integers(0, 3), st.integers(-9, 9), st.integers(-9, 9), st.integers(-3, 3),
       st.randoms())
def test_canonical_form_orbit_invariance(bs, turns, dx, dy, dz, rnd):
    moved = list(bs)
    for _ in range(turns):
        moved = [rotate90(b) for b in moved]
    moved = [(x + dx, y + dy, z + dz, o) for x, y, z, o in moved]
    rnd.shuffle(moved)
    assert is_connected(moved)
    assert canonical_form(moved) == bs
