import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canteen.epistemic import (
    KnowledgeLabel,
    KripkeModel,
    build_model,
    both_before_nine,
    common_knowledge,
    everyone_knows,
    iterate_everyone_knows,
    knowledge_label,
    knows,
    label_table,
    message_chain_model,
)
from canteen.game import ArrivalPair, TimeRange, components, parse_time

R = TimeRange.parse("8:10", "9:10")

legal_ranges = st.builds(
    TimeRange,
    st.integers(-2, 5).map(lambda k: 10 * k),
    st.integers(6, 10).map(lambda k: 10 * k),
)

# the component of (8:10, 8:20) on [8:10, 9:10], in canonical order
CHAIN = (
    ArrivalPair(10, 20),
    ArrivalPair(30, 20),
    ArrivalPair(30, 40),
    ArrivalPair(50, 40),
    ArrivalPair(50, 60),
    ArrivalPair(70, 60),
)


def test_model_worlds_and_classes():
    model = build_model(R)
    assert len(model.worlds) == 12
    split = components(R)
    assert set(split.first) | set(split.second) == set(model.worlds)
    for player in (1, 2):
        for w in model.worlds:
            cls = model.classes[player][w]
            assert w in cls  # reflexive
            assert 1 <= len(cls) <= 2
            assert all(v.arrival(player) == w.arrival(player) for v in cls)


def test_boundary_world_is_singleton():
    model = build_model(R)
    assert model.classes[1][ArrivalPair(10, 20)] == {ArrivalPair(10, 20)}
    assert model.classes[2][ArrivalPair(20, 10)] == {ArrivalPair(20, 10)}


def test_knows_rejects_foreign_proposition():
    model = build_model(R)
    with pytest.raises(ValueError):
        knows(model, 1, frozenset({ArrivalPair(-10, 0)}))


def test_knows_necessitation_and_factivity():
    model = build_model(R)
    top = model.all_worlds()
    assert knows(model, 1, top) == top
    p = both_before_nine(model)
    for agent in (1, 2):
        assert knows(model, agent, p) <= p


def test_knows_excludes_door_worlds():
    # knowing "both early" fails wherever the player's own arrival is 8:50
    model = build_model(R)
    p = both_before_nine(model)
    k1 = knows(model, 1, p)
    assert all(w.t1 != 50 for w in k1)
    assert ArrivalPair(30, 40) in k1


def test_everyone_knows_on_chain():
    model = build_model(R)
    p = model.proposition(CHAIN[:4])
    e1 = everyone_knows(model, p)
    assert e1 & set(CHAIN) == set(CHAIN[:3])
    assert e1 <= knows(model, 1, p)
    assert e1 <= knows(model, 2, p)


def test_iterated_everyone_knows_on_chain():
    model = build_model(R)
    p = model.proposition(CHAIN[:4])
    assert iterate_everyone_knows(model, p, 0) == p
    assert iterate_everyone_knows(model, p, 2) & set(CHAIN) == set(CHAIN[:2])
    assert iterate_everyone_knows(model, p, 3) & set(CHAIN) == set(CHAIN[:1])
    assert iterate_everyone_knows(model, p, 4) & set(CHAIN) == set()


def test_iterate_rejects_negative_depth():
    model = build_model(R)
    with pytest.raises(ValueError):
        iterate_everyone_knows(model, model.all_worlds(), -1)


@given(legal_ranges, st.integers(0, 6))
@settings(max_examples=40)
def test_everyone_knows_monotone(rng, n):
    model = build_model(rng)
    p = both_before_nine(model)
    assert iterate_everyone_knows(model, p, n) >= iterate_everyone_knows(model, p, n + 1)
    top = model.all_worlds()
    assert iterate_everyone_knows(model, top, n) == top


@given(legal_ranges)
@settings(max_examples=40)
def test_knowledge_is_monotone_factive_idempotent(rng):
    model = build_model(rng)
    p = both_before_nine(model)
    q = model.proposition(w for w in model.worlds if w.t1 < 50)
    for agent in (1, 2):
        kp = knows(model, agent, p)
        assert kp <= p
        assert knows(model, agent, kp) == kp
        if q <= p:
            assert knows(model, agent, q) <= kp


def test_no_common_knowledge_of_early_arrival():
    model = build_model(R)
    assert common_knowledge(model, both_before_nine(model)) == frozenset()


def test_common_knowledge_of_everything():
    model = build_model(R)
    top = model.all_worlds()
    assert common_knowledge(model, top) == top


@given(legal_ranges)
@settings(max_examples=40)
def test_fixpoint_is_reached_within_world_count(rng):
    model = build_model(rng)
    p = both_before_nine(model)
    ck = common_knowledge(model, p)
    assert ck == iterate_everyone_knows(model, p, len(model.worlds))
    assert everyone_knows(model, ck) == ck
    assert ck == frozenset()


def test_knowledge_ladder_labels():
    expected = {
        "8:10": "shared:4",
        "8:20": "shared:3",
        "8:30": "shared:2",
        "8:40": "shared:1",
        "8:50": "private",
        "9:00": "none",
        "9:10": "none",
    }
    assert dict(label_table(R)) == expected


def test_label_outside_range_rejected():
    with pytest.raises(ValueError):
        knowledge_label(R, parse_time("8:00"))


def test_label_parse_round_trip():
    for text in ("none", "private", "shared:3"):
        assert str(KnowledgeLabel.parse(text)) == text
    with pytest.raises(ValueError):
        KnowledgeLabel.parse("common")


@given(legal_ranges)
@settings(max_examples=25)
def test_labels_match_closed_form(rng):
    # early times t = 8:50 - 10n label as shared(n), 8:50 as private, 9:00+
    # as none; at t = tmin the singleton information class keeps the same
    # closed form valid even though the worlds involved differ
    for t in rng.times():
        label = knowledge_label(rng, t)
        if t >= 60:
            assert label == KnowledgeLabel("none")
        elif t == 50:
            assert label == KnowledgeLabel("private")
        else:
            assert label == KnowledgeLabel("shared", (50 - t) // 10)


def test_labels_on_short_range():
    short = TimeRange.parse("8:40", "9:00")
    assert knowledge_label(short, parse_time("8:40")) == KnowledgeLabel("shared", 1)
    assert knowledge_label(short, parse_time("8:50")) == KnowledgeLabel("private")
    assert knowledge_label(short, parse_time("9:00")) == KnowledgeLabel("none")


def test_message_chain_zero_messages():
    model, depth = message_chain_model(0)
    assert depth == 0
    assert model.worlds == (0,)


def test_message_chain_classes():
    model, _ = message_chain_model(4)
    assert model.classes[1][0] == {0, 1}
    assert model.classes[1][4] == {4}
    assert model.classes[2][0] == {0}
    assert model.classes[2][3] == {3, 4}


def test_message_chain_depths():
    # one confirmation (k=2) yields first-order shared knowledge of the
    # delivery fact; the warning it carries is thereby shared to depth two
    depths = [message_chain_model(k)[1] for k in range(11)]
    assert depths == [0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9]


def test_message_chain_never_common_knowledge():
    for k in range(11):
        model, _ = message_chain_model(k)
        p = model.proposition(m for m in model.worlds if m >= 1)
        assert common_knowledge(model, p) == frozenset()


def test_message_chain_rejects_negative():
    with pytest.raises(ValueError):
        message_chain_model(-1)


def test_partition_validation():
    with pytest.raises(ValueError):
        KripkeModel.from_partitions([0, 1], {1: [{0}], 2: [{0}, {1}]})
    with pytest.raises(ValueError):
        KripkeModel.from_partitions([0, 1], {1: [{0, 1}, {1}], 2: [{0}, {1}]})
