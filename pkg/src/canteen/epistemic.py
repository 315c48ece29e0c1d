"""Knowledge operators over finite Kripke models of the game.

Worlds are arrival pairs (or message counts, for the message-chain model)
and each player's accessibility relation is the equivalence "same own
arrival time". Propositions are extensional world sets, so everyone-knows
iteration and the common-knowledge fixpoint are exact finite-set
computations.

The central fact the game is built on: the proposition "both arrived
before 9:00" is never common knowledge, however early a player arrives.
What an early arrival buys is bounded-depth shared knowledge, one extra
level per 10 minutes ahead of 8:50.

Label convention: a fact everybody knows counts as shared knowledge to
depth one (and also as private knowledge). A stricter convention exists
that treats bare everyone-knows as still-private until someone knows that
everyone knows; it is not implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .game import NINE_AM, ArrivalPair, TimeRange, arrival_pairs, format_time

World = Hashable
Proposition = frozenset


@dataclass(frozen=True)
class KripkeModel:
    """Finite model with one equivalence relation per agent.

    `classes` maps each agent to a partition of the worlds, stored as
    world -> its equivalence class.
    """

    worlds: tuple[World, ...]
    classes: dict[int, dict[World, frozenset]]

    @classmethod
    def from_partitions(
        cls, worlds: Iterable[World], partitions: dict[int, list[set]]
    ) -> "KripkeModel":
        worlds = tuple(worlds)
        world_set = set(worlds)
        classes: dict[int, dict[World, frozenset]] = {}
        for agent, blocks in partitions.items():
            seen: set = set()
            by_world: dict[World, frozenset] = {}
            for block in blocks:
                if not block or not block <= world_set or block & seen:
                    raise ValueError(f"blocks of agent {agent} do not partition the worlds")
                frozen = frozenset(block)
                seen |= block
                for w in block:
                    by_world[w] = frozen
            if seen != world_set:
                raise ValueError(f"blocks of agent {agent} do not cover the worlds")
            classes[agent] = by_world
        return cls(worlds, classes)

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(sorted(self.classes))

    def proposition(self, members: Iterable[World]) -> Proposition:
        ext = frozenset(members)
        if not ext <= set(self.worlds):
            raise ValueError("proposition contains worlds outside the model")
        return ext

    def all_worlds(self) -> Proposition:
        return frozenset(self.worlds)

    def _check(self, phi: Proposition) -> None:
        if not phi <= set(self.worlds):
            raise ValueError("proposition does not belong to this model")


def knows(model: KripkeModel, agent: int, phi: Proposition) -> Proposition:
    """Worlds where the agent knows phi: their whole class sits inside phi."""
    model._check(phi)
    classes = model.classes[agent]
    return frozenset(w for w in model.worlds if classes[w] <= phi)


def everyone_knows(model: KripkeModel, phi: Proposition) -> Proposition:
    """Worlds where every agent knows phi: the intersection of all K_i(phi)."""
    ext = model.proposition(phi)
    result = model.all_worlds()
    for agent in model.agents:
        result &= knows(model, agent, ext)
    return result


def iterate_everyone_knows(model: KripkeModel, phi: Proposition, n: int) -> Proposition:
    """n-fold everyone-knows; n = 0 returns phi itself."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    ext = model.proposition(phi)
    for _ in range(n):
        ext = everyone_knows(model, ext)
    return ext


def common_knowledge(model: KripkeModel, phi: Proposition) -> Proposition:
    """Greatest fixpoint of everyone-knows below phi.

    On a finite model the chain E^n(phi) stabilizes within |worlds| steps.
    """
    ext = model.proposition(phi)
    while True:
        nxt = everyone_knows(model, ext)
        if nxt == ext:
            return ext
        ext = nxt


def build_model(rng: TimeRange) -> KripkeModel:
    """Kripke model of the game: worlds are arrival pairs, and a player
    confuses two worlds exactly when their own arrival agrees."""
    worlds = arrival_pairs(rng)
    partitions: dict[int, list[set]] = {}
    for player in (1, 2):
        blocks: dict[int, set] = {}
        for pair in worlds:
            blocks.setdefault(pair.arrival(player), set()).add(pair)
        partitions[player] = list(blocks.values())
    return KripkeModel.from_partitions(worlds, partitions)


def both_before_nine(model: KripkeModel) -> Proposition:
    """The game's pivotal proposition: both players arrived before 9:00."""
    return frozenset(
        w for w in model.worlds if isinstance(w, ArrivalPair) and w.t1 < NINE_AM and w.t2 < NINE_AM
    )


@dataclass(frozen=True)
class KnowledgeLabel:
    """What a player arriving at some time knows about "both before 9:00".

    kind is "none" (own arrival is at or past 9:00), "private" (the player
    knows their own arrival is early but cannot rule out the other being
    late), or "shared" with the maximum depth n >= 1 such that the player
    knows everyone-knows-to-depth-(n-1) the proposition.
    """

    kind: str
    depth: int | None = None

    def __str__(self) -> str:
        return f"shared:{self.depth}" if self.kind == "shared" else self.kind

    @classmethod
    def parse(cls, text: str) -> "KnowledgeLabel":
        if text.startswith("shared:"):
            return cls("shared", int(text.split(":", 1)[1]))
        if text in ("none", "private"):
            return cls(text)
        raise ValueError(f"unknown label: {text!r}")


NONE_LABEL = KnowledgeLabel("none")
PRIVATE_LABEL = KnowledgeLabel("private")


def _label_for_player(model: KripkeModel, player: int, t: int) -> KnowledgeLabel:
    own_worlds = frozenset(w for w in model.worlds if w.arrival(player) == t)
    if not own_worlds:
        raise ValueError(f"no world has player {player} arriving at {format_time(t)}")
    if t >= NINE_AM:
        return NONE_LABEL
    p = both_before_nine(model)
    depth = 0
    level = p  # E^(n-1) p for the n about to be tested
    for _ in range(len(model.worlds) + 1):
        if own_worlds <= knows(model, player, level):
            depth += 1
            level = everyone_knows(model, level)
        else:
            break
    return KnowledgeLabel("shared", depth) if depth else PRIVATE_LABEL


def knowledge_label(rng: TimeRange, t: int) -> KnowledgeLabel:
    """Knowledge level attached to an arrival time, computed from the
    operators over every world with that own arrival (both components).

    By the mirror symmetry of the model the label does not depend on which
    player arrives at t; this is asserted rather than assumed.
    """
    if t not in rng:
        raise ValueError(f"{format_time(t)} is outside the range {rng}")
    model = build_model(rng)
    label1 = _label_for_player(model, 1, t)
    label2 = _label_for_player(model, 2, t)
    if label1 != label2:
        raise AssertionError(f"asymmetric labels at {format_time(t)}: {label1} vs {label2}")
    return label1


def label_table(rng: TimeRange) -> list[tuple[str, str]]:
    """(arrival time, label) rows for every grid time, for CSV export."""
    return [(format_time(t), str(knowledge_label(rng, t))) for t in rng.times()]


def message_chain_model(k: int) -> tuple[KripkeModel, int]:
    """Model of k delivered messages in an acknowledgement chain.

    World m means the first m messages arrived. The sender of message m+1
    never learns whether it arrived, so agent 1 (who sends the odd
    messages) confuses {0,1}, {2,3}, ... and agent 2 confuses {1,2},
    {3,4}, ..., truncated to {0..k}.

    Returns the model and the shared-knowledge depth, at the actual world
    k, of the proposition "message 1 was delivered": the largest n with
    k in E^n(p). The warning the first message carries sits one knowledge
    level above its own delivery, so a depth of n here means the warning
    is shared to depth n+1. Common knowledge is never reached for any k.
    """
    if k < 0:
        raise ValueError("message count must be non-negative")
    worlds = tuple(range(k + 1))
    partitions: dict[int, list[set]] = {}
    for agent, start in ((1, 0), (2, 1)):
        blocks = [{m, m + 1} & set(worlds) for m in range(start, k + 1, 2)]
        blocks = [b for b in blocks if b]
        covered = set().union(*blocks) if blocks else set()
        blocks += [{m} for m in worlds if m not in covered]
        partitions[agent] = blocks
    model = KripkeModel.from_partitions(worlds, partitions)
    p = model.proposition(m for m in worlds if m >= 1)
    depth = 0
    level = p
    while k in level:
        nxt = everyone_knows(model, level)
        if nxt == level:
            raise AssertionError("delivery can never become common knowledge")
        if k not in nxt:
            break
        depth += 1
        level = nxt
    return model, depth
