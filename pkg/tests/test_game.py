import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from canteen.game import (
    Action,
    ArrivalPair,
    ConfigError,
    TimeRange,
    arrival_pairs,
    components,
    deal,
    format_time,
    is_forbidden,
    parse_time,
)

R_ANALYSIS = TimeRange.parse("8:10", "9:10")
R_LIVE = TimeRange.parse("8:00", "9:10")

# hypothesis strategy over legal ranges: tmin in [7:00, 8:50], tmax in [9:00, 10:00]
legal_ranges = st.builds(
    TimeRange,
    st.integers(-6, 5).map(lambda k: 10 * k),
    st.integers(6, 12).map(lambda k: 10 * k),
)


def test_time_round_trip():
    assert parse_time("8:40") == 40
    assert parse_time("9:00") == 60
    assert format_time(0) == "8:00"
    assert format_time(70) == "9:10"
    assert format_time(-10) == "7:50"
    assert parse_time(format_time(-20)) == -20


def test_time_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_time("nine")


def test_action_encoding():
    assert int(Action.CANTEEN) == 0
    assert int(Action.OFFICE) == 1
    assert Action.parse("office") is Action.OFFICE
    assert str(Action.CANTEEN) == "canteen"


@pytest.mark.parametrize(
    "tmin,tmax",
    [("9:00", "9:10"), ("8:10", "8:50"), ("8:15", "9:10")],
)
def test_invalid_ranges_rejected(tmin, tmax):
    with pytest.raises(ConfigError):
        TimeRange.parse(tmin, tmax)


def test_pair_count_analysis_range():
    assert len(arrival_pairs(R_ANALYSIS)) == 12


def test_pair_count_live_range():
    # 8 grid times: 7 ascending pairs (t, t+10) plus 7 descending
    assert len(arrival_pairs(R_LIVE)) == 14


def test_smallest_legal_range():
    rng = TimeRange.parse("8:50", "9:00")
    assert arrival_pairs(rng) == (ArrivalPair(50, 60), ArrivalPair(60, 50))


@given(legal_ranges)
def test_pair_count_formula(rng):
    assert len(arrival_pairs(rng)) == 2 * (rng.tmax - rng.tmin) // 10


@given(legal_ranges)
def test_pairs_are_legal_and_sorted(rng):
    pairs = arrival_pairs(rng)
    assert list(pairs) == sorted(pairs)
    assert len(set(pairs)) == len(pairs)
    for p in pairs:
        assert abs(p.t1 - p.t2) == 10
        assert p.t1 in rng and p.t2 in rng


def test_pair_requires_ten_minute_gap():
    with pytest.raises(ValueError):
        ArrivalPair(40, 60)


def test_deal_is_deterministic():
    a = [deal(R_ANALYSIS, random.Random(7)) for _ in range(100)]
    b = [deal(R_ANALYSIS, random.Random(7)) for _ in range(100)]
    assert a == b


def test_deal_membership():
    pairs = set(arrival_pairs(R_LIVE))
    rand = random.Random(3)
    assert all(deal(R_LIVE, rand) in pairs for _ in range(500))


def test_deal_is_uniform():
    rand = random.Random(42)
    counts = Counter(deal(R_ANALYSIS, rand) for _ in range(120_000))
    assert set(counts) == set(arrival_pairs(R_ANALYSIS))
    for n in counts.values():
        assert abs(n / 120_000 - 1 / 12) < 0.01


@pytest.mark.parametrize(
    "t,action,expected",
    [
        (60, Action.CANTEEN, True),
        (70, Action.CANTEEN, True),
        (50, Action.CANTEEN, False),
        (70, Action.OFFICE, False),
        (60, Action.OFFICE, False),
    ],
)
def test_is_forbidden(t, action, expected):
    assert is_forbidden(t, action) is expected


def test_components_match_closed_form():
    # first component on [8:10, 9:10]: pairs (8:10+20x, 8:20+20y) with y <= x <= y+1
    split = components(R_ANALYSIS)
    closed_form = {
        ArrivalPair(10 + 20 * x, 20 + 20 * y)
        for x in range(4)
        for y in range(4)
        if y <= x <= y + 1 and 10 + 20 * x <= 70 and 20 + 20 * y <= 70
    }
    assert set(split.first) == closed_form
    assert set(split.second) == {p.swapped() for p in closed_form}


@given(legal_ranges)
def test_exactly_two_mirrored_components(rng):
    split = components(rng)
    pairs = set(arrival_pairs(rng))
    assert set(split.first) | set(split.second) == pairs
    assert not set(split.first) & set(split.second)
    assert {p.swapped() for p in split.first} == set(split.second)


@given(legal_ranges)
def test_component_chains(rng):
    # within a component, consecutive pairs in canonical order share a time;
    # equivalence classes of "same own arrival" have size at most 2
    split = components(rng)
    for comp in (split.first, split.second):
        for a, b in zip(comp, comp[1:]):
            assert a.t1 == b.t1 or a.t2 == b.t2
    for player in (1, 2):
        by_own = Counter(p.arrival(player) for p in arrival_pairs(rng))
        assert max(by_own.values()) <= 2
