"""Opt-in long tier: BRICKCOUNT_LONG=1 pytest -m long"""

import pytest

from brickcount import fixtures
from brickcount.brick3d import count_buildings
from brickcount.cli import FULL_REACH
from brickcount.transfer import tm_run

pytestmark = pytest.mark.long


def test_six_brick_buildings():
    assert count_buildings(6) == 915103765


@pytest.mark.parametrize("w", sorted(FULL_REACH))
def test_full_reach_without_time_budget(w):
    n = FULL_REACH[w]
    assert tm_run(w, n).counts == fixtures.flat_counts(w)[:n]
