import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from canteen.game import Action
from canteen.scoring import (
    CERTAINTY_GRID,
    UTILITY_MAX,
    UTILITY_MIN,
    Certainty,
    apply_round,
    best_report,
    display_dollars,
    expected_round_utility,
    penalty_ratio,
    utility,
)

C, O = Action.CANTEEN, Action.OFFICE
EARLY = 40  # 8:40
LATE = 60  # 9:00


def test_grid_values_and_order():
    probs = [level.p for level in CERTAINTY_GRID]
    assert probs == [0.5, 0.625, 0.75, 0.875, 0.99]
    assert probs == sorted(probs)


def test_likert_mapping_bijective():
    for level in CERTAINTY_GRID:
        assert Certainty.from_p(level.p) is level
    assert Certainty.parse("somewhat_certain") is Certainty.SOMEWHAT_CERTAIN
    with pytest.raises(ValueError):
        Certainty.parse("certainish")
    with pytest.raises(ValueError):
        Certainty.from_p(0.6)


def test_worked_example_values():
    e = Certainty.SOMEWHAT_CERTAIN  # 0.75
    assert utility(e, C, C, EARLY, 50) == pytest.approx(-0.29, abs=0.005)
    assert utility(e, C, O, EARLY, 50) == pytest.approx(-2.77, abs=0.005)
    assert utility(e, O, O, EARLY, 50) == pytest.approx(-0.58, abs=0.005)


def test_worst_case_miscoordination():
    u = utility(Certainty.VERY_CERTAIN, C, O, LATE, 50)
    assert u == pytest.approx(2 * math.log(0.01))
    assert u == pytest.approx(-9.21, abs=0.005)


def test_forbidden_choice_scored_as_miscoordination():
    # both choosing canteen at/after 9:00 still earns the failure tier
    e = Certainty.VERY_CERTAIN
    assert utility(e, C, C, LATE, 50) == pytest.approx(2 * math.log(0.01))
    assert utility(e, O, C, 50, LATE) == pytest.approx(2 * math.log(0.01))
    # office is never forbidden
    assert utility(e, O, O, 70, LATE) == pytest.approx(2 * math.log(0.99))


@given(st.sampled_from(CERTAINTY_GRID))
def test_outcome_ordering_before_nine(e):
    # strict tiering holds for e > 0.5; at e = 0.5 the office and failure
    # tiers coincide, since ln(e) = ln(1-e) there
    cc = utility(e, C, C, EARLY, 50)
    oo = utility(e, O, O, EARLY, 50)
    co = utility(e, C, O, EARLY, 50)
    oc = utility(e, O, C, EARLY, 50)
    assert cc > oo >= co
    assert co == oc
    if e.p > 0.5:
        assert oo > co


@given(st.sampled_from(CERTAINTY_GRID))
def test_office_dominates_when_late(e):
    oo = utility(e, O, O, 50, LATE)
    for a1, a2 in [(C, C), (C, O), (O, C)]:
        if e.p > 0.5:
            assert oo > utility(e, a1, a2, 50, LATE)
        else:
            assert oo >= utility(e, a1, a2, 50, LATE)


@given(st.sampled_from(CERTAINTY_GRID), st.sampled_from([C, O]), st.sampled_from([C, O]))
def test_single_round_bounds(e, a1, a2):
    u = utility(e, a1, a2, 50, EARLY)
    assert UTILITY_MIN <= u <= UTILITY_MAX


def test_apply_round_and_ruin():
    balance, ruined = apply_round(0.50, 2 * math.log(0.01))
    assert ruined and balance < 0
    balance, ruined = apply_round(10.0, math.log(0.99))
    assert not ruined


def test_ten_round_bankrolls():
    office = 10.0
    canteen = 10.0
    for _ in range(10):
        office, _ = apply_round(office, utility(Certainty.VERY_CERTAIN, O, O, EARLY, 50))
        canteen, _ = apply_round(canteen, utility(Certainty.VERY_CERTAIN, C, C, EARLY, 50))
    assert display_dollars(office) == 9.80
    assert display_dollars(canteen) == 9.90


@given(st.lists(st.floats(-9.3, -0.01), min_size=1, max_size=40))
def test_fold_equals_sum(penalties):
    balance = 30.0
    for u in penalties:
        balance, _ = apply_round(balance, u)
    assert balance == pytest.approx(30.0 + sum(penalties), abs=1e-12)


def test_penalty_ratio_values():
    # direct evaluation; dividing the display-rounded dollar amounts instead gives 921
    assert penalty_ratio(Certainty.VERY_CERTAIN) == pytest.approx(916.4235, abs=0.01)
    assert abs(-9.21 / -0.01) == pytest.approx(921.0)
    assert penalty_ratio(Certainty.VERY_UNCERTAIN) == pytest.approx(2.0)


def test_penalty_ratio_increasing():
    ratios = [penalty_ratio(e) for e in CERTAINTY_GRID]
    assert ratios == sorted(ratios)
    assert len(set(ratios)) == len(ratios)


def grid_argmax(q, action, t):
    # independent oracle: evaluate all five grid points, lowest wins ties
    best, best_eu = None, -math.inf
    for level in CERTAINTY_GRID:
        eu = expected_round_utility(level, q, action, t)
        if eu > best_eu:
            best, best_eu = level, eu
    return best


def test_best_report_office_is_nearly_proper():
    assert best_report(0.75, O, EARLY) is Certainty.SOMEWHAT_CERTAIN


def test_best_report_canteen_understates():
    assert best_report(0.75, C, EARLY) is Certainty.SLIGHTLY_CERTAIN


def test_best_report_certain_belief():
    assert best_report(1.0, C, EARLY) is Certainty.VERY_CERTAIN
    assert best_report(1.0, O, EARLY) is Certainty.VERY_CERTAIN


def test_best_report_forbidden_choice_minimizes_claim():
    assert best_report(1.0, C, LATE) is Certainty.VERY_UNCERTAIN


@given(st.floats(0, 1), st.sampled_from([C, O]), st.sampled_from([EARLY, 50, LATE]))
def test_best_report_matches_grid_oracle(q, action, t):
    assert best_report(q, action, t) is grid_argmax(q, action, t)


def test_best_report_rejects_non_probability():
    with pytest.raises(ValueError):
        best_report(1.5, C, EARLY)
