"""Logarithmic-scoring penalties, certainty grid, and bankroll dynamics.

After choosing canteen or office, each player reports how certain they are
that the other made the same choice, on a five-point scale mapped to
probabilities {0.5, 0.625, 0.75, 0.875, 0.99}. The round's penalty is a
log score of that report: ln(e) for canteen coordination, 2 ln(e) for
office coordination, 2 ln(1-e) for miscoordination or any forbidden
canteen choice. Penalties are negative; bankrolls only go down.

The rule is deliberately not strictly proper across the outcome tiers:
for a canteen choice the expected-penalty-minimizing report understates
the true matching probability (see best_report).
"""

from __future__ import annotations

import math
from enum import Enum

from .game import Action, is_forbidden


class Certainty(Enum):
    """Five-point certainty report with its probability encoding."""

    VERY_UNCERTAIN = "very_uncertain"
    SLIGHTLY_CERTAIN = "slightly_certain"
    SOMEWHAT_CERTAIN = "somewhat_certain"
    QUITE_CERTAIN = "quite_certain"
    VERY_CERTAIN = "very_certain"

    @property
    def p(self) -> float:
        return _PROBABILITY[self]

    @classmethod
    def from_p(cls, p: float) -> "Certainty":
        for level, value in _PROBABILITY.items():
            if value == p:
                return level
        raise ValueError(f"not a grid probability: {p}")

    @classmethod
    def parse(cls, text: str) -> "Certainty":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown certainty level: {text!r}") from None

    def __str__(self) -> str:
        return self.value


_PROBABILITY = {
    Certainty.VERY_UNCERTAIN: 0.5,
    Certainty.SLIGHTLY_CERTAIN: 0.625,
    Certainty.SOMEWHAT_CERTAIN: 0.75,
    Certainty.QUITE_CERTAIN: 0.875,
    Certainty.VERY_CERTAIN: 0.99,
}

CERTAINTY_GRID = tuple(Certainty)

# Single-round utility is bounded by the worst miscoordination at e=0.99
# and the best canteen coordination at e=0.99.
UTILITY_MIN = 2 * math.log(1 - 0.99)
UTILITY_MAX = math.log(0.99)


def utility(
    e: Certainty,
    a_self: Action,
    a_other: Action,
    t_self: int,
    t_other: int,
) -> float:
    """One player's (negative) utility for a round.

    Forbidden choices are scored as miscoordination, never rejected. Each
    player is scored against their own report, so the call is made once
    per player with roles swapped.
    """
    p = e.p
    if is_forbidden(t_self, a_self) or is_forbidden(t_other, a_other):
        return 2 * math.log(1 - p)
    a1, a2 = int(a_self), int(a_other)
    mismatch = abs(a1 - a2)
    return (1 - mismatch + a1 * a2) * math.log(p) + 2 * mismatch * math.log(1 - p)


def apply_round(balance: float, u: float) -> tuple[float, bool]:
    """Apply a round's utility to a bankroll; ruin means balance <= 0."""
    balance += u
    return balance, balance <= 0


def penalty_ratio(e: Certainty) -> float:
    """Miscoordination penalty relative to canteen-coordination penalty.

    |2 ln(1-e)| / |ln e|; about 916.4 at e=0.99. Dividing the two
    display-rounded dollar amounts (9.21 / 0.01) instead gives 921.
    """
    p = e.p
    return abs(2 * math.log(1 - p)) / abs(math.log(p))


def expected_round_utility(e: Certainty, q: float, a: Action, t: int) -> float:
    """Expected utility of reporting e, believing the other matches w.p. q.

    Assumes a matching canteen choice is legal (both before 9:00); a
    forbidden own choice is scored as miscoordination regardless of q.
    """
    p = e.p
    if is_forbidden(t, a):
        return 2 * math.log(1 - p)
    if a is Action.CANTEEN:
        return q * math.log(p) + (1 - q) * 2 * math.log(1 - p)
    return q * 2 * math.log(p) + (1 - q) * 2 * math.log(1 - p)


def best_report(q: float, a: Action, t: int) -> Certainty:
    """The grid report maximizing expected utility under belief q.

    Ties break toward the lower report. The office branch is proper up to
    grid rounding; the canteen branch is not, e.g. q=0.75 is best served
    by reporting 0.625.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"belief must be a probability, got {q}")
    best = CERTAINTY_GRID[0]
    best_eu = expected_round_utility(best, q, a, t)
    for level in CERTAINTY_GRID[1:]:
        eu = expected_round_utility(level, q, a, t)
        if eu > best_eu:
            best, best_eu = level, eu
    return best


def display_dollars(x: float) -> float:
    """Round to cents for logs and wire messages; state keeps full precision."""
    return round(x, 2)
