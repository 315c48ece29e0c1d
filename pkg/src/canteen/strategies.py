"""Strategy enumeration, expected utility, safety, and the Pareto front.

Strategies are uniform: a player's move depends only on their own arrival
time, so a strategy is a total map from grid times to actions and the
whole profile space is finite (2^n x 2^n for n grid times). Brute force
over that space is the ground truth here; the structural results about
the game (no canteen at 9:00+, no office followed by canteen, only two
front candidates) are verified against the enumeration rather than
trusted.

The game splits into two independent subgames (the components of the
arrival-pair graph), and a profile is optimal iff its restriction to each
component is; fronts are therefore computed per component and combined.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .game import (
    NINE_AM,
    STEP,
    Action,
    ArrivalPair,
    TimeRange,
    arrival_pairs,
    components,
    format_time,
    is_forbidden,
)
from .scoring import Certainty, utility

MAX_PROFILE_BITS = 24  # enumeration guard: at most 2^24 profiles


class CapacityError(ValueError):
    """Raised when a range is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class Strategy:
    """Total map from own arrival time to action."""

    times: tuple[int, ...]
    actions: tuple[Action, ...]

    def __post_init__(self) -> None:
        if len(self.times) != len(self.actions):
            raise ValueError("one action per arrival time required")

    def act(self, t: int) -> Action:
        try:
            return self.actions[self.times.index(t)]
        except ValueError:
            raise ValueError(f"strategy not defined at {format_time(t)}") from None

    @classmethod
    def from_rule(cls, times: Sequence[int], rule: Callable[[int], Action]) -> "Strategy":
        times = tuple(times)
        return cls(times, tuple(rule(t) for t in times))

    @classmethod
    def cutoff(cls, times: Sequence[int], t_c: float) -> "Strategy":
        """Canteen strictly before t_c, office at or after it."""
        return cls.from_rule(times, lambda t: Action.CANTEEN if t < t_c else Action.OFFICE)

    @classmethod
    def all_office(cls, times: Sequence[int]) -> "Strategy":
        return cls.from_rule(times, lambda t: Action.OFFICE)

    @classmethod
    def canteen_before_nine(cls, times: Sequence[int]) -> "Strategy":
        return cls.cutoff(times, NINE_AM - STEP / 2)

    def __str__(self) -> str:
        parts = (f"{format_time(t)}->{a}" for t, a in zip(self.times, self.actions))
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class StrategyProfile:
    """One strategy per player, over the same arrival times."""

    s1: Strategy
    s2: Strategy

    def moves(self, pair: ArrivalPair) -> tuple[Action, Action]:
        return self.s1.act(pair.t1), self.s2.act(pair.t2)

    def swapped(self) -> "StrategyProfile":
        return StrategyProfile(self.s2, self.s1)


def classify(s: Strategy) -> float | None:
    """Cut-off time of a threshold strategy, or None for a non-cut-off one.

    The canonical cut-off is the midpoint between the last canteen time and
    the first office time; an all-office strategy reports a cut-off one
    half-step before the earliest arrival, all-canteen one half-step after
    the latest.
    """
    canteen_times = [t for t, a in zip(s.times, s.actions) if a is Action.CANTEEN]
    office_times = [t for t, a in zip(s.times, s.actions) if a is Action.OFFICE]
    if not canteen_times:
        return min(s.times) - STEP / 2
    if not office_times:
        return max(s.times) + STEP / 2
    if max(canteen_times) > min(office_times):
        return None
    return (max(canteen_times) + min(office_times)) / 2


@dataclass(frozen=True)
class UtilityModel:
    """Per-pair payoff u_t(a1, a2), common to both players.

    Abstract models carry three ordered constants: canteen coordination,
    office coordination, and miscoordination (which also prices every
    outcome touching a forbidden canteen choice). They must satisfy
    v_cc > v_oo > v_mis so early coordination beats office coordination
    beats failure, and office coordination stays best once anyone is late.

    The concrete model scores with the log rule at a fixed certainty
    policy; both players' penalties coincide whenever the policy gives
    them equal reports, and the pair payoff is their average otherwise.
    """

    kind: str  # "abstract" | "log_score"
    v_cc: float = 0.0
    v_oo: float = 0.0
    v_mis: float = 0.0
    certainty_policy: Callable[[int, Action], Certainty] | None = None
    per_pair: dict[ArrivalPair, tuple[float, float, float]] | None = field(
        default=None, compare=False
    )

    @classmethod
    def abstract(
        cls,
        v_cc: float,
        v_oo: float,
        v_mis: float,
        per_pair: dict[ArrivalPair, tuple[float, float, float]] | None = None,
    ) -> "UtilityModel":
        if not v_cc > v_oo > v_mis:
            raise ValueError("need v_cc > v_oo > v_mis")
        if per_pair:
            for cc, oo, mis in per_pair.values():
                if not cc > oo > mis:
                    raise ValueError("per-pair constants must keep the ordering")
        return cls("abstract", v_cc, v_oo, v_mis, per_pair=per_pair)

    @classmethod
    def log_score(
        cls, certainty_policy: Callable[[int, Action], Certainty] | None = None
    ) -> "UtilityModel":
        policy = certainty_policy or (lambda t, a: Certainty.VERY_CERTAIN)
        return cls("log_score", certainty_policy=policy)

    def payoff(self, pair: ArrivalPair, a1: Action, a2: Action) -> float:
        if self.kind == "log_score":
            e1 = self.certainty_policy(pair.t1, a1)
            e2 = self.certainty_policy(pair.t2, a2)
            u1 = utility(e1, a1, a2, pair.t1, pair.t2)
            u2 = utility(e2, a2, a1, pair.t2, pair.t1)
            return (u1 + u2) / 2
        v_cc, v_oo, v_mis = (
            self.per_pair.get(pair, (self.v_cc, self.v_oo, self.v_mis))
            if self.per_pair
            else (self.v_cc, self.v_oo, self.v_mis)
        )
        if is_forbidden(pair.t1, a1) or is_forbidden(pair.t2, a2):
            return v_mis
        if a1 is not a2:
            return v_mis
        return v_cc if a1 is Action.CANTEEN else v_oo

    def table(self, pair: ArrivalPair) -> np.ndarray:
        """2x2 payoff table for the pair, indexed [a1][a2]."""
        return np.array(
            [[self.payoff(pair, Action(a1), Action(a2)) for a2 in (0, 1)] for a1 in (0, 1)]
        )


def random_ordered_model(rand: random.Random) -> UtilityModel:
    """Sample an abstract model with three descending negative constants."""
    while True:
        vals = sorted((rand.uniform(-10.0, -0.001) for _ in range(3)), reverse=True)
        if vals[0] > vals[1] > vals[2]:
            return UtilityModel.abstract(*vals)


def expected_utility(profile: StrategyProfile, rng: TimeRange, model: UtilityModel) -> float:
    """Mean payoff over all arrival pairs (nature draws uniformly)."""
    pairs = arrival_pairs(rng)
    return sum(model.payoff(p, *profile.moves(p)) for p in pairs) / len(pairs)


def is_safe(profile: StrategyProfile, rng: TimeRange) -> bool:
    """No arrival pair miscoordinates or touches a forbidden canteen choice."""
    for pair in arrival_pairs(rng):
        a1, a2 = profile.moves(pair)
        if a1 is not a2:
            return False
        if is_forbidden(pair.t1, a1) or is_forbidden(pair.t2, a2):
            return False
    return True


def _enumerate_actions(n: int) -> np.ndarray:
    """All 2^n strategies over n times as a (2^n, n) array of 0/1 actions.

    Row index read in binary gives the actions, bit j = action at time j.
    """
    if n > MAX_PROFILE_BITS // 2:
        raise CapacityError(f"2^{n} strategies per player exceeds the enumeration guard")
    codes = np.arange(2**n, dtype=np.int64)
    return (codes[:, None] >> np.arange(n)[None, :]) & 1


def _eu_matrix(
    pairs: Sequence[ArrivalPair],
    times1: Sequence[int],
    times2: Sequence[int],
    model: UtilityModel,
) -> np.ndarray:
    """EU of every profile over the given pairs: entry [i, j] is the mean
    payoff of (strategy i for player 1, strategy j for player 2)."""
    s1 = _enumerate_actions(len(times1))
    s2 = _enumerate_actions(len(times2))
    idx1 = {t: j for j, t in enumerate(times1)}
    idx2 = {t: j for j, t in enumerate(times2)}
    eu = np.zeros((s1.shape[0], s2.shape[0]))
    for pair in pairs:
        table = model.table(pair)
        eu += table[s1[:, idx1[pair.t1]][:, None], s2[:, idx2[pair.t2]][None, :]]
    return eu / len(pairs)


def _strategy_from_row(times: Sequence[int], row: np.ndarray) -> Strategy:
    return Strategy(tuple(times), tuple(Action(int(a)) for a in row))


def _player_times(pairs: Sequence[ArrivalPair], player: int) -> tuple[int, ...]:
    return tuple(sorted({p.arrival(player) for p in pairs}))


@dataclass(frozen=True)
class ComponentFront:
    """EU-maximal restricted profiles of one subgame."""

    pairs: tuple[ArrivalPair, ...]
    profiles: tuple[StrategyProfile, ...]
    eu: float


@dataclass(frozen=True)
class ParetoReport:
    """Exhaustive-enumeration results plus the structural checks.

    lemma1_ok: no front profile sends anyone to the canteen at 9:00+.
    lemma2_ok: no front profile has an office choice at t with a canteen
    choice at t+10.
    theorem1_ok: every component front is a subset of {all-office,
    cut-off 8:55} restricted to that component.
    """

    range: TimeRange
    fronts: tuple[ComponentFront, ComponentFront]
    combined: tuple[StrategyProfile, ...]
    combined_eu: float
    lemma1_ok: bool
    lemma2_ok: bool
    theorem1_ok: bool


def _violates_lemma1(profile: StrategyProfile) -> bool:
    return any(
        a is Action.CANTEEN and t >= NINE_AM
        for s in (profile.s1, profile.s2)
        for t, a in zip(s.times, s.actions)
    )


def _violates_lemma2(profile: StrategyProfile, pairs: Sequence[ArrivalPair]) -> bool:
    """Office for the earlier arrival, canteen for the later one, at some pair."""
    for pair in pairs:
        a1, a2 = profile.moves(pair)
        if pair.t2 == pair.t1 + STEP and a1 is Action.OFFICE and a2 is Action.CANTEEN:
            return True
        if pair.t1 == pair.t2 + STEP and a2 is Action.OFFICE and a1 is Action.CANTEEN:
            return True
    return False


def _component_front(
    pairs: Sequence[ArrivalPair], model: UtilityModel
) -> tuple[ComponentFront, np.ndarray, tuple[int, ...], tuple[int, ...]]:
    times1 = _player_times(pairs, 1)
    times2 = _player_times(pairs, 2)
    eu = _eu_matrix(pairs, times1, times2, model)
    best = eu.max()
    rows, cols = np.nonzero(eu == best)
    s1_codes = _enumerate_actions(len(times1))
    s2_codes = _enumerate_actions(len(times2))
    profiles = tuple(
        StrategyProfile(
            _strategy_from_row(times1, s1_codes[i]), _strategy_from_row(times2, s2_codes[j])
        )
        for i, j in zip(rows, cols)
    )
    return ComponentFront(tuple(pairs), profiles, float(best)), eu, times1, times2


def pareto_front(rng: TimeRange, model: UtilityModel) -> ParetoReport:
    """Enumerate every profile per component and report the EU-maximal set.

    The combined front is the cross product of the component fronts; its
    EU is the pair-count-weighted average of the component maxima, which
    equals the full-game expected utility of any combined profile.
    """
    split = components(rng)
    fronts = []
    for comp in (split.first, split.second):
        front, _, _, _ = _component_front(comp, model)
        fronts.append(front)

    candidates = {
        "all_office": Strategy.all_office,
        "cutoff_855": Strategy.canteen_before_nine,
    }
    theorem_ok = True
    lemma1_ok = True
    lemma2_ok = True
    for front in fronts:
        times1 = _player_times(front.pairs, 1)
        times2 = _player_times(front.pairs, 2)
        allowed = {
            StrategyProfile(make(times1), make(times2)) for make in candidates.values()
        }
        if not set(front.profiles) <= allowed:
            theorem_ok = False
        for profile in front.profiles:
            if _violates_lemma1(profile):
                lemma1_ok = False
            if _violates_lemma2(profile, front.pairs):
                lemma2_ok = False

    n_pairs = len(split.first) + len(split.second)
    combined_eu = sum(front.eu * len(front.pairs) for front in fronts) / n_pairs
    combined = tuple(
        _merge_profiles(p1, p2) for p1 in fronts[0].profiles for p2 in fronts[1].profiles
    )
    return ParetoReport(
        range=rng,
        fronts=(fronts[0], fronts[1]),
        combined=combined,
        combined_eu=combined_eu,
        lemma1_ok=lemma1_ok,
        lemma2_ok=lemma2_ok,
        theorem1_ok=theorem_ok,
    )


def _merge_profiles(a: StrategyProfile, b: StrategyProfile) -> StrategyProfile:
    """Join two component-restricted profiles into one full-game profile."""

    def merge(x: Strategy, y: Strategy) -> Strategy:
        mapping = dict(zip(x.times, x.actions)) | dict(zip(y.times, y.actions))
        times = tuple(sorted(mapping))
        return Strategy(times, tuple(mapping[t] for t in times))

    return StrategyProfile(merge(a.s1, b.s1), merge(a.s2, b.s2))


def enumerate_full_eu(rng: TimeRange, model: UtilityModel) -> np.ndarray:
    """EU of all 2^n x 2^n full-game profiles; used as the whole-game oracle
    against the component decomposition."""
    times = rng.times()
    if 2 * len(times) > MAX_PROFILE_BITS:
        raise CapacityError(f"2^{2 * len(times)} profiles exceeds the enumeration guard")
    return _eu_matrix(arrival_pairs(rng), times, times, model)


def safe_profiles(rng: TimeRange) -> list[StrategyProfile]:
    """Exhaustive scan for profiles with zero miscoordination risk."""
    times = rng.times()
    if 2 * len(times) > MAX_PROFILE_BITS:
        raise CapacityError(f"2^{2 * len(times)} profiles exceeds the enumeration guard")
    acts = _enumerate_actions(len(times))
    idx = {t: j for j, t in enumerate(times)}
    ok = np.ones((acts.shape[0], acts.shape[0]), dtype=bool)
    for pair in arrival_pairs(rng):
        a1 = acts[:, idx[pair.t1]][:, None]
        a2 = acts[:, idx[pair.t2]][None, :]
        coordinated = a1 == a2
        late = pair.t1 >= NINE_AM or pair.t2 >= NINE_AM
        legal = (a1 == 1) if late else np.ones_like(coordinated)
        ok &= coordinated & legal
    rows, cols = np.nonzero(ok)
    return [
        StrategyProfile(_strategy_from_row(times, acts[i]), _strategy_from_row(times, acts[j]))
        for i, j in zip(rows, cols)
    ]


def eu_by_cutoff(rng: TimeRange, model: UtilityModel) -> list[tuple[str, float]]:
    """EU of every cut-off profile, labelled by cut-off midpoint; the
    all-office profile appears as the cut-off before tmin."""
    times = rng.times()
    rows = []
    for t_c in [times[0] - STEP / 2] + [t + STEP / 2 for t in times]:
        profile = StrategyProfile(Strategy.cutoff(times, t_c), Strategy.cutoff(times, t_c))
        label = "all_office" if t_c < times[0] else f"cutoff_{format_time(int(t_c))}"
        rows.append((label, expected_utility(profile, rng, model)))
    return rows
