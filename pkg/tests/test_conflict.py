import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from stackconflict.conflict import (RewardGaps, aoc_analytic, aoc_curve, aoc_oracle, area_of_conflict,
                                    aug_altruism_bounds, batch_conflict_oracle, canonical_game, conflict_predicate,
                                    equilibrium_conflict_oracle, rasterize_region)
from stackconflict.exceptions import AssumptionViolated
from stackconflict.game import BimatrixGame, PlayerId, detect_conflict, reward_gaps
from stackconflict.transforms import Model

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
LANE_FINITE = BimatrixGame.from_pairs([[(-5, -5), (0, 1)], [(1, 0), (-5, -5)]], ("LCB", "LCA"), ("GW", "C"))


@pytest.mark.parametrize("model,expected", [
    ("baseline", 1.0), ("altruism", 0.5), ("svo", 0.5), ("pure", 1.0), ("aug", 2 * math.log(2) - 1),
])
def test_analytic_unit_gaps(model, expected):
    assert aoc_analytic(model, RewardGaps(1, 1)) == pytest.approx(expected, abs=1e-15)


def test_aug_unit_gaps_against_published_digits():
    assert abs(aoc_analytic("aug", (1, 1)) - 0.38623) < 5e-4


def test_pure_altruism_unequal_gaps():
    assert aoc_analytic("pure", (2, 1)) == 0.5
    assert aoc_oracle("pure", (2, 1), 400) == pytest.approx(0.5, abs=0.01)


def test_analytic_matches_frozen_integrals():
    # independent high-precision integration of each conflict region
    for model, table in FROZEN["aoc"].items():
        for key, value in table.items():
            A, B = map(float, key.split(","))
            assert aoc_analytic(model, RewardGaps(A, B)) == pytest.approx(value, abs=1e-12), (model, key)


def test_frozen_constant():
    assert float(FROZEN["two_ln2_minus_1"]) == pytest.approx(2 * math.log(2) - 1, abs=1e-16)


@pytest.mark.parametrize("bad", [0, -1, math.inf, math.nan])
def test_gaps_validation(bad):
    with pytest.raises(ValueError):
        RewardGaps(bad, 1)


def test_gaps_from_game():
    assert RewardGaps.from_game(LANE_FINITE) == RewardGaps(1, 1)


gap = st.floats(0.1, 10)


@settings(max_examples=200, deadline=None)
@given(gap, gap, st.sampled_from(list(Model)))
def test_symmetry_and_range(A, B, model):
    v = aoc_analytic(model, (A, B))
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(aoc_analytic(model, (B, A)), abs=1e-12)


@pytest.mark.parametrize("model,a1,a2,expected", [
    ("altruism", 0.9, 0.9, True),
    ("altruism", 0.9, 0.1, False),
    ("aug", 0.0, 0.3, False),
    ("aug", 0.0, 0.999, False),
    ("svo", 0.1, 0.1, True),
    ("baseline", 0.4, 0.7, True),
])
def test_predicate_examples(model, a1, a2, expected):
    assert bool(conflict_predicate(model, (1, 1), a1, a2)) is expected


def test_aug_bounds_form():
    lo, hi = aug_altruism_bounds((1, 1), 0.5)
    assert lo == pytest.approx(0.0)
    assert hi == pytest.approx(1 / 1.5)


def test_oracle_examples():
    assert equilibrium_conflict_oracle(LANE_FINITE, "baseline", 0, 0) is True
    assert equilibrium_conflict_oracle(LANE_FINITE, "altruism", 1, 0) is False
    assert equilibrium_conflict_oracle(LANE_FINITE, "altruism", 0.5, 0.5) is None


def test_oracle_requires_gap_ordering():
    bad = BimatrixGame.from_pairs([[(0, 0), (0, 1)], [(1, 0), (2, -1)]])
    with pytest.raises(AssumptionViolated):
        equilibrium_conflict_oracle(bad, "baseline", 0, 0)


def test_canonical_game_shape():
    game = canonical_game((2, 3))
    assert reward_gaps(game) == (2.0, 3.0)
    assert game.reward(0, 0, PlayerId.ROW) == -1.0
    assert detect_conflict(game).in_conflict


def test_aoc_oracle_examples():
    assert aoc_oracle("baseline", (3, 0.2), 100) == 1.0
    assert aoc_oracle("altruism", (1, 1), 1000) == pytest.approx(0.5, abs=0.01)
    assert aoc_oracle("aug", (1, 1), 1000) == pytest.approx(0.3863, abs=0.01)
    with pytest.raises(ValueError):
        aoc_oracle("aug", (1, 1), 9)


def test_aoc_oracle_chunking_is_invisible():
    a = aoc_oracle("svo", (1.7, 0.6), 120, return_boundary=True)
    b = aoc_oracle("svo", (1.7, 0.6), 120, chunk=997, return_boundary=True)
    assert a == b


def test_area_of_conflict_record():
    res = area_of_conflict("altruism", (2, 1), oracle_resolution=200)
    assert res.analytic == pytest.approx(4 / 9)
    assert abs(res.analytic - res.oracle_estimate) < 0.01
    assert area_of_conflict("pure", (1, 2)).oracle_estimate is None


def test_batch_oracle_matches_scalar_oracle():
    rng = np.random.default_rng(7)
    for model in Model:
        A, B = rng.uniform(0.1, 10, 2)
        game = canonical_game((A, B))
        a = rng.uniform(0, model.upper, (60, 2))
        if model is Model.AUGMENTED_ALTRUISM:
            a = np.minimum(a, 0.99)
        conflict, tie = batch_conflict_oracle((A, B), model, a[:, 0], a[:, 1])
        for (a1, a2), c, t in zip(a, conflict, tie):
            scalar = equilibrium_conflict_oracle(game, model, a1, a2)
            assert (scalar is None) == t
            if scalar is not None:
                assert scalar == c


def test_raster_examples():
    r = rasterize_region("baseline", (1, 1), 4)
    assert r.cells.shape == (4, 4) and r.cells.all()
    r = rasterize_region("altruism", (1, 1), 2)
    np.testing.assert_array_equal(r.cells, [[True, False], [False, True]])
    np.testing.assert_allclose(r.centers, [0.25, 0.75])
    with pytest.raises(ValueError):
        rasterize_region("altruism", (1, 1), 0)


def test_aug_region_is_one_connected_band():
    r = rasterize_region("aug", (1, 1), 400)
    # the band narrows like 2(1 - alpha1)^2 near alpha1 = 1, so pixels there
    # detach; check connectivity where it spans several cells
    wide = r.cells[:, r.centers < 0.9]
    _, count = ndimage.label(wide, structure=np.ones((3, 3)))
    assert count == 1
    assert r.fraction == pytest.approx(aoc_analytic("aug", (1, 1)), abs=0.01)


def test_raster_fraction_converges():
    errs = [abs(rasterize_region("svo", (2.5, 1), n).fraction - aoc_analytic("svo", (2.5, 1))) for n in (20, 400)]
    assert errs[1] < 0.005
    assert errs[1] <= errs[0]


def test_curve_examples():
    (a, v), = aoc_curve("aug", 1.0, (1.0, 1.0), 1)
    assert a == 1.0 and abs(v - 0.38623) < 5e-4
    small = aoc_curve("altruism", 1.0, (1e-6, 1e-6), 1)[0][1]
    assert small < 1e-5
    rows = aoc_curve("svo", 2.0, (0.5, 4.0), 8)
    assert len(rows) == 8 and rows[0][0] == 0.5 and rows[-1][0] == 4.0
    with pytest.raises(ValueError):
        aoc_curve("svo", 1.0, (0.0, 1.0), 5)
    with pytest.raises(ValueError):
        aoc_curve("svo", 1.0, (2.0, 1.0), 5)


def test_aug_strictly_smallest_inside_stated_range():
    for A in np.linspace(0.34, 2.9, 60):
        aug = aoc_analytic("aug", (A, 1))
        assert aug < aoc_analytic("altruism", (A, 1))
        assert aug < aoc_analytic("svo", (A, 1))


@settings(max_examples=100, deadline=None)
@given(gap, gap, st.floats(0.001, 0.999), st.floats(0, 1))
def test_aug_predicate_is_the_band(A, B, a1, a2):
    lo, hi = aug_altruism_bounds((A, B), a1)
    inside = bool(conflict_predicate("aug", (A, B), a1, a2))
    assert inside == bool(lo < a2 < hi)
