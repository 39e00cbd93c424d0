import math
import random

import numpy as np
import pytest

from sosbias import constants, race, sieve
from sosbias.errors import DomainError

DESK_N = 10**7


@pytest.mark.parametrize(
    "q,a,b,weight",
    [(3, 1, 2, "indicator_S"), (5, 4, 3, "indicator_S"), (15, 7, 8, "indicator_S"), (12, 1, 5, "indicator_S"),
     (4, 1, 3, "omega"), (4, 1, 3, "big_omega"), (7, 3, 5, "omega")],
)
def test_streaming_matches_brute_force(q, a, b, weight):
    N = 20_000
    s = race.run_race(q, a, b, N, weight, stride=13, segment=4_099, cache_dir=None, workers=1)
    lead, tie, trail, diffs = race.brute_force_counts(q, a, b, N, weight)
    assert (s.lead_count, s.tie_count, s.trail_count) == (lead, tie, trail)
    assert np.array_equal(s.diff, diffs[s.checkpoints])
    assert s.lead_count + s.tie_count + s.trail_count == N


def test_chunk_boundaries(monkeypatch):
    monkeypatch.setattr(race, "CHUNK", 1000)
    s = race.run_race(5, 1, 2, 12_345, stride=7, segment=5_000, cache_dir=None, workers=1)
    lead, tie, trail, diffs = race.brute_force_counts(5, 1, 2, 12_345)
    assert (s.lead_count, s.tie_count, s.trail_count) == (lead, tie, trail)
    assert np.array_equal(s.diff, diffs[s.checkpoints])


def test_antisymmetry():
    ab, ba = race.run_races(5, [(1, 2), (2, 1)], 50_000, cache_dir=None)
    assert (ab.lead_count, ab.tie_count, ab.trail_count) == (ba.trail_count, ba.tie_count, ba.lead_count)


def test_equal_residues_tie_everywhere():
    s = race.run_race(3, 1, 1, 1000, cache_dir=None)
    assert s.lead_density == 0 and s.tie_density == 1


def test_checkpoints_consistent_with_count_by_residue(desk_blocks):
    s = race.run_race(15, 1, 2, DESK_N, blocks=desk_blocks)
    rng = random.Random(3)
    for i in rng.sample(range(s.checkpoints.size), 3):
        x = int(s.checkpoints[i])
        block = sieve.make_block(1, x + 1, sieve.KIND_S)
        totals = sieve.count_by_residue(block, 15)
        assert int(s.count_a[i]) == totals[1] and int(s.count_b[i]) == totals[2]


def test_figure3_series_properties(desk_blocks):
    s = race.figure3_series(DESK_N, blocks=desk_blocks)
    assert s.checkpoints.size >= 10**4
    assert s.diff[-1] > 0
    small = race.figure3_series(100, stride=1, cache_dir=None)
    assert small.diff[9] == 0  # x = 10: {1, 4, 10} vs {2, 5, 8}
    assert np.abs(np.diff(small.diff)).max() <= 1


def test_q3_desk_density(desk_blocks):
    s = race.run_race(3, 1, 2, DESK_N, checkpoints=[DESK_N], blocks=desk_blocks)
    assert 0.90 <= s.lead_density < 1.0


@pytest.mark.long
def test_q3_long_run():
    s = race.run_race(3, 1, 2, 10**8, checkpoints=[10**8], cache_dir=None)
    assert abs(100 * s.lead_density - 96.8) <= 0.1


def test_q5_matches_published_after_truncation(desk_blocks):
    # The printed one-decimal percentages agree with the exact counts when truncated, not when rounded.
    series = race.run_races(5, list(race.PUBLISHED_Q5), DESK_N, checkpoints=[DESK_N], blocks=desk_blocks)
    frozen = {(1, 2): 9616397, (1, 3): 9527101, (4, 2): 9531547, (4, 3): 9460285}
    for s in series:
        assert s.lead_count == frozen[(s.a, s.b)]
        assert math.floor(1000 * s.lead_density) == round(1000 * race.PUBLISHED_Q5[(s.a, s.b)])


def test_table2_pairs():
    pairs = race.table2_pairs()
    assert pairs == list(race.PUBLISHED_TABLE2)
    assert len(pairs) == 24


def test_table2_selected_entries(desk_blocks):
    got = race.table2(DESK_N, blocks=desk_blocks)
    for pair in [(1, 2), (7, 8), (11, 13), (1, 7)]:
        assert abs(got[pair] - race.PUBLISHED_TABLE2[pair]) <= 0.05


def test_table2_equals_truncated_percentages(desk_blocks):
    got = race.table2(DESK_N, blocks=desk_blocks)
    for pair, printed in race.PUBLISHED_TABLE2.items():
        assert math.floor(100 * got[pair] + 1e-9) == round(100 * printed)


def test_table1_table2_correlation(desk_blocks):
    tab1 = constants.table1()
    series = race.run_races(15, race.table2_pairs(), DESK_N, checkpoints=[DESK_N], blocks=desk_blocks)
    for s in series:
        c = tab1[(s.a, s.b)].value
        if abs(c) > 1:
            assert np.sign(s.diff[-1]) == np.sign(c)
            assert (s.lead_density > 0.5) == (c > 0)


def test_square_ratio_pair_changes_sign(desk_blocks):
    # 2/8 = 4 is a square mod 15, so no main term
    assert constants.c_qab(15, 2, 8).value == 0
    s = race.run_race(15, 2, 8, DESK_N, blocks=desk_blocks)
    high = s.diff[s.checkpoints > 10**4]
    assert (high > 0).any() and (high < 0).any()
    assert race.predicted_coefficient(15, 2, 8, "indicator_S") == 0


def test_main_term_fit_q3(desk_blocks):
    s = race.run_race(3, 1, 2, DESK_N, stride=DESK_N // 100, blocks=desk_blocks)
    rep = race.main_term_fit(s)
    assert rep.predicted_coefficient == pytest.approx(constants.predicted_coefficient(3, 1, 2))
    assert len(rep.windows) == 6
    assert rep.windows[0]["mean_abs_e"] < rep.predicted_coefficient
    assert rep.summary["lead_count"] == s.lead_count


def test_normalized_diff_sign_matches_constant(desk_blocks):
    tab1 = constants.table1()
    nonzero = [p for p, c in tab1.items() if c.value != 0]
    assert len(nonzero) == 24
    big = [p for p in nonzero if abs(tab1[p].value) > 1]
    series = race.run_races(15, big, DESK_N, checkpoints=[DESK_N], blocks=desk_blocks)
    for s in series:
        assert np.sign(race.main_term_fit(s).normalized_final_diff) == np.sign(tab1[(s.a, s.b)].value)


def test_martin_directions(desk_blocks):
    for weight in ("omega", "big_omega"):
        s = race.run_race(4, 1, 3, DESK_N, weight, checkpoints=[DESK_N], blocks=desk_blocks)
        assert s.lead_density > 0.95
    assert race.predicted_coefficient(4, 1, 3, "omega") < 0 < race.predicted_coefficient(4, 1, 3, "big_omega")


def test_series_rows():
    s = race.run_race(3, 1, 2, 1000, stride=100, cache_dir=None)
    rows = list(race.series_rows(s))
    assert len(rows) == 10
    x, ca, cb, d, main, resid = rows[-1]
    assert x == 1000 and d == ca - cb
    assert float(resid) == pytest.approx(d - float(main), abs=1e-5)


@pytest.mark.parametrize(
    "args",
    [(15, 3, 1, 100), (5, 1, 5, 100), (12, 1, 7, 100), (4, 1, 3, 100)],
)
def test_precondition_errors(args):
    q, a, b, N = args
    with pytest.raises(DomainError):
        race.run_race(q, a, b, N, "indicator_S", cache_dir=None)


def test_unknown_weight_and_bad_checkpoints():
    with pytest.raises(DomainError):
        race.run_race(3, 1, 2, 100, "phi", cache_dir=None)
    with pytest.raises(DomainError):
        race.run_race(3, 1, 2, 100, checkpoints=[0, 50], cache_dir=None)


def test_checkpoint_grid():
    g = race.checkpoint_grid(10**7)
    assert g.size == 10**4 and g[-1] == 10**7
    assert race.checkpoint_grid(10, 3).tolist() == [3, 6, 9, 10]
