"""Core model of the Canteen Dilemma: arrival times, nature's move, and the
two-subgame structure.

Two colleagues arrive at work 10 minutes apart on a fixed grid of times.
Each sees only their own arrival. Before 9:00 both may go to the canteen;
at 9:00 or later the canteen is forbidden. Nature's move is an arrival
pair (t1, t2) with |t1 - t2| = 10, drawn uniformly from the grid.

Times are integer minutes after 8:00 so that equality and the +-10
arithmetic are exact. They serialize as "H:MM" strings in logs and wire
messages.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum

STEP = 10
NINE_AM = 60  # minutes after 8:00
LATEST_SAFE = 50  # 8:50, last grid time strictly before 9:00


def parse_time(text: str) -> int:
    """Parse an "H:MM" clock string into minutes after 8:00."""
    try:
        hours, minutes = text.strip().split(":")
        value = int(hours) * 60 + int(minutes) - 480
    except ValueError as exc:
        raise ValueError(f"not a clock time: {text!r}") from exc
    return value


def format_time(minutes: int) -> str:
    """Render minutes after 8:00 as an "H:MM" clock string."""
    hours, mins = divmod(480 + minutes, 60)
    return f"{hours}:{mins:02d}"


class Action(IntEnum):
    """A player's move. The numeric encoding feeds the penalty formula."""

    CANTEEN = 0
    OFFICE = 1

    def __str__(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Action":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown action: {text!r}") from None


class ConfigError(ValueError):
    """Raised for arrival ranges the analysis does not support."""


@dataclass(frozen=True)
class TimeRange:
    """Inclusive grid [tmin, tmax] of arrival times, in 10-minute steps.

    The analysis requires tmin <= 8:50 and tmax >= 9:00, so the grid always
    straddles the 9:00 cutoff.
    """

    tmin: int
    tmax: int

    def __post_init__(self) -> None:
        if self.tmin % STEP or self.tmax % STEP:
            raise ConfigError("arrival times must sit on the 10-minute grid")
        if self.tmin > LATEST_SAFE:
            raise ConfigError(f"tmin must be at most {format_time(LATEST_SAFE)}")
        if self.tmax < NINE_AM:
            raise ConfigError(f"tmax must be at least {format_time(NINE_AM)}")

    @classmethod
    def parse(cls, tmin: str, tmax: str) -> "TimeRange":
        return cls(parse_time(tmin), parse_time(tmax))

    def times(self) -> tuple[int, ...]:
        return tuple(range(self.tmin, self.tmax + 1, STEP))

    def __contains__(self, t: int) -> bool:
        return self.tmin <= t <= self.tmax and t % STEP == 0

    def __str__(self) -> str:
        return f"[{format_time(self.tmin)}, {format_time(self.tmax)}]"


# Default grids: live sessions use the wider deployment grid, worked
# analysis examples the narrower one. Both are configurable everywhere.
LIVE_RANGE = TimeRange(parse_time("8:00"), parse_time("9:10"))
ANALYSIS_RANGE = TimeRange(parse_time("8:10"), parse_time("9:10"))


@dataclass(frozen=True, order=True)
class ArrivalPair:
    """Nature's move: player 1 arrives at t1, player 2 at t2, 10 min apart."""

    t1: int
    t2: int

    def __post_init__(self) -> None:
        if abs(self.t1 - self.t2) != STEP:
            raise ValueError("arrival times must differ by exactly 10 minutes")

    def arrival(self, player: int) -> int:
        if player == 1:
            return self.t1
        if player == 2:
            return self.t2
        raise ValueError(f"no such player: {player}")

    def swapped(self) -> "ArrivalPair":
        return ArrivalPair(self.t2, self.t1)

    def __str__(self) -> str:
        return f"({format_time(self.t1)}, {format_time(self.t2)})"


def arrival_pairs(rng: TimeRange) -> tuple[ArrivalPair, ...]:
    """All legal arrival pairs for the grid, in lexicographic (t1, t2) order.

    |T| = 2 * (tmax - tmin) / 10: each grid time except the last starts one
    ascending pair, each except the first one descending pair.
    """
    pairs = [ArrivalPair(t, t + STEP) for t in range(rng.tmin, rng.tmax - STEP + 1, STEP)]
    pairs += [ArrivalPair(t, t - STEP) for t in range(rng.tmin + STEP, rng.tmax + 1, STEP)]
    return tuple(sorted(pairs))


def deal(rng: TimeRange, rand: random.Random) -> ArrivalPair:
    """Draw one arrival pair uniformly at random."""
    return rand.choice(arrival_pairs(rng))


def is_forbidden(t: int, action: Action) -> bool:
    """The canteen is off-limits at 9:00 or later; the office never is."""
    return action is Action.CANTEEN and t >= NINE_AM


def indistinguishable(player: int, a: ArrivalPair, b: ArrivalPair) -> bool:
    """A player cannot tell apart two pairs sharing their own arrival time."""
    return a.arrival(player) == b.arrival(player)


@dataclass(frozen=True)
class SubgamePartition:
    """The two connected components of T under both players' relations.

    The components are disjoint, cover T, and are mirror images of each
    other under swapping (t1, t2) -> (t2, t1); no pair in one is
    indistinguishable from a pair in the other by either player. `first`
    is the component containing (tmin, tmin+10).
    """

    first: tuple[ArrivalPair, ...]
    second: tuple[ArrivalPair, ...]

    def containing(self, pair: ArrivalPair) -> tuple[ArrivalPair, ...]:
        if pair in self.first:
            return self.first
        if pair in self.second:
            return self.second
        raise ValueError(f"pair {pair} is in neither component")


def components(rng: TimeRange) -> SubgamePartition:
    """Split T into its two maximal chains of mutually confusable pairs.

    Pairs are linked when some player cannot distinguish them; the
    resulting graph has exactly two components, each a chain in which
    consecutive pairs share one player's arrival time.
    """
    pairs = arrival_pairs(rng)
    remaining = set(pairs)
    groups: list[list[ArrivalPair]] = []
    while remaining:
        seed = min(remaining)
        stack, group = [seed], []
        remaining.discard(seed)
        while stack:
            cur = stack.pop()
            group.append(cur)
            linked = [
                other
                for other in tuple(remaining)
                if indistinguishable(1, cur, other) or indistinguishable(2, cur, other)
            ]
            for other in linked:
                remaining.discard(other)
                stack.append(other)
        groups.append(sorted(group))
    if len(groups) != 2:
        raise AssertionError(f"expected two components, found {len(groups)}")
    first, second = groups
    if ArrivalPair(rng.tmin, rng.tmin + STEP) not in first:
        first, second = second, first
    return SubgamePartition(tuple(first), tuple(second))
