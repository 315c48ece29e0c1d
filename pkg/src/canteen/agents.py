"""Agent policies, repeated-session simulation, and logistic fitting.

Policies decide canteen/office from the observed arrival time alone and
attach a certainty report. Besides the two analytical benchmarks
(all-office and canteen-before-9) there is the guess-at-the-boundary rule
people appear to play: canteen when clearly early, office when clearly
late, a coin flip at the boundary time. Self-play of that rule
miscoordinates about half the time whenever one arrival sits on the
boundary, which is the mechanistic signature the simulation reproduces.

The default certainty rule is stylized, not fitted to anything: confident
at the extremes, only somewhat certain at 8:50.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import game
from .game import Action, ArrivalPair, TimeRange, format_time
from .scoring import Certainty, utility

CertaintyRule = Callable[[int, Action], Certainty]


def stylized_certainty(t: int, action: Action) -> Certainty:
    """High confidence at the extremes, hedged at the 8:50 boundary."""
    if t >= game.NINE_AM:
        return Certainty.VERY_CERTAIN
    if t == game.LATEST_SAFE:
        return Certainty.SOMEWHAT_CERTAIN
    if t == game.LATEST_SAFE - game.STEP:
        return Certainty.QUITE_CERTAIN
    return Certainty.VERY_CERTAIN


def constant_certainty(level: Certainty) -> CertaintyRule:
    return lambda t, action: level


@dataclass(frozen=True)
class Policy:
    """A decision rule plus a certainty rule.

    Every policy goes to the office at 9:00 or later unless
    force_office_late is switched off (useful only for deliberately
    irrational agents, e.g. unconstrained logistic responders).
    """

    kind: str
    cutoff: float | None = None
    guess_time: int | None = None
    guess_q: float | None = None
    alpha: float | None = None
    beta: float | None = None
    certainty_rule: CertaintyRule = stylized_certainty
    force_office_late: bool = True

    @classmethod
    def all_office(cls, **kw) -> "Policy":
        return cls("all_office", **kw)

    @classmethod
    def canteen_before_nine(cls, **kw) -> "Policy":
        return cls("canteen_before_9", cutoff=game.NINE_AM - game.STEP / 2, **kw)

    @classmethod
    def cutoff_at(cls, t_c: float, **kw) -> "Policy":
        return cls("cutoff", cutoff=t_c, **kw)

    @classmethod
    def mixed_guess(cls, t_g: int, q: float, **kw) -> "Policy":
        if not 0.0 <= q <= 1.0:
            raise ValueError("guess probability must be in [0, 1]")
        return cls("mixed_guess", guess_time=t_g, guess_q=q, **kw)

    @classmethod
    def logistic(cls, alpha: float, beta: float, **kw) -> "Policy":
        return cls("logistic", alpha=alpha, beta=beta, **kw)

    def with_certainty(self, rule: CertaintyRule) -> "Policy":
        return replace(self, certainty_rule=rule)

    def p_canteen(self, t: int) -> float:
        """Probability this policy picks the canteen at arrival t."""
        if self.force_office_late and t >= game.NINE_AM:
            return 0.0
        if self.kind == "all_office":
            return 0.0
        if self.kind in ("canteen_before_9", "cutoff"):
            return 1.0 if t < self.cutoff else 0.0
        if self.kind == "mixed_guess":
            if t < self.guess_time:
                return 1.0
            if t > self.guess_time:
                return 0.0
            return self.guess_q
        if self.kind == "logistic":
            return 1.0 / (1.0 + math.exp(-(self.alpha + self.beta * t)))
        raise ValueError(f"unknown policy kind: {self.kind}")

    def decide(self, t: int, rand: random.Random) -> tuple[Action, Certainty]:
        p = self.p_canteen(t)
        if p <= 0.0:
            action = Action.OFFICE
        elif p >= 1.0:
            action = Action.CANTEEN
        else:
            action = Action.CANTEEN if rand.random() < p else Action.OFFICE
        return action, self.certainty_rule(t, action)

    def observe(self, outcome: "RoundOutcome") -> None:
        """Hook for history-aware play. Deliberately inert: all shipped
        policies are memoryless, matching the round-by-round analysis."""

    def describe(self) -> str:
        if self.kind == "cutoff":
            return f"cutoff:{format_time(int(self.cutoff))}"
        if self.kind == "mixed_guess":
            return f"mixed:{format_time(self.guess_time)}:{self.guess_q:g}"
        if self.kind == "logistic":
            return f"logistic:{self.alpha:g}:{self.beta:g}"
        return self.kind


@dataclass(frozen=True)
class SessionConfig:
    """Parameters of one repeated game."""

    range: TimeRange = game.LIVE_RANGE
    max_rounds: int = 10
    endowment: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise ValueError("a session needs at least one round")
        if self.endowment <= 0:
            raise ValueError("endowment must be positive")


@dataclass(frozen=True)
class RoundOutcome:
    round: int
    pair: ArrivalPair
    actions: tuple[Action, Action]
    certainties: tuple[Certainty, Certainty]
    utilities: tuple[float, float]
    balances: tuple[float, float]

    def miscoordinated(self) -> bool:
        a1, a2 = self.actions
        return (
            a1 is not a2
            or game.is_forbidden(self.pair.t1, a1)
            or game.is_forbidden(self.pair.t2, a2)
        )


@dataclass(frozen=True)
class SessionLog:
    config: SessionConfig
    rounds: tuple[RoundOutcome, ...]
    final_balances: tuple[float, float]
    ended_by_ruin: bool

    @property
    def rounds_played(self) -> int:
        return len(self.rounds)


def play_round(
    round_no: int,
    pair: ArrivalPair,
    p1: Policy,
    p2: Policy,
    balances: tuple[float, float],
    rand: random.Random,
) -> RoundOutcome:
    a1, e1 = p1.decide(pair.t1, rand)
    a2, e2 = p2.decide(pair.t2, rand)
    u1 = utility(e1, a1, a2, pair.t1, pair.t2)
    u2 = utility(e2, a2, a1, pair.t2, pair.t1)
    return RoundOutcome(
        round=round_no,
        pair=pair,
        actions=(a1, a2),
        certainties=(e1, e2),
        utilities=(u1, u2),
        balances=(balances[0] + u1, balances[1] + u2),
    )


def run_session(
    cfg: SessionConfig, p1: Policy, p2: Policy, rand: random.Random | None = None
) -> SessionLog:
    """Play up to max_rounds rounds, stopping as soon as a bankroll hits zero."""
    rand = rand if rand is not None else random.Random(cfg.seed)
    balances = (cfg.endowment, cfg.endowment)
    rounds: list[RoundOutcome] = []
    ruined = False
    for round_no in range(1, cfg.max_rounds + 1):
        pair = game.deal(cfg.range, rand)
        outcome = play_round(round_no, pair, p1, p2, balances, rand)
        rounds.append(outcome)
        p1.observe(outcome)
        p2.observe(outcome)
        balances = outcome.balances
        if min(balances) <= 0:
            ruined = True
            break
    return SessionLog(cfg, tuple(rounds), balances, ruined)


def _pair_key(pair: ArrivalPair) -> tuple[int, int]:
    return (min(pair.t1, pair.t2), max(pair.t1, pair.t2))


def format_pair_key(key: tuple[int, int]) -> str:
    return f"{format_time(key[0])}/{format_time(key[1])}"


@dataclass
class SimStats:
    """Aggregates over a batch of simulated sessions.

    Pair outcomes are keyed by the unordered arrival combination, so
    (8:40, 8:50) and (8:50, 8:40) count together.
    """

    n_sessions: int = 0
    max_rounds: int = 0
    total_rounds: int = 0
    ruined_players: int = 0
    total_payoff: float = 0.0
    total_penalty: float = 0.0
    canteen_coord: Counter = field(default_factory=Counter)
    office_coord: Counter = field(default_factory=Counter)
    miscoordination: Counter = field(default_factory=Counter)
    endowment: float = 0.0

    @property
    def n_players(self) -> int:
        return 2 * self.n_sessions

    @property
    def rounds_played_avg(self) -> float:
        return self.total_rounds / self.n_sessions

    @property
    def ruin_rate(self) -> float:
        return self.ruined_players / self.n_players

    @property
    def payoff_retained(self) -> float:
        return self.total_payoff / (self.n_players * self.endowment)

    @property
    def avg_penalty_per_round(self) -> float:
        return self.total_penalty / (2 * self.total_rounds)

    def miscoordination_fraction(self, key: tuple[int, int]) -> float:
        total = self.canteen_coord[key] + self.office_coord[key] + self.miscoordination[key]
        return self.miscoordination[key] / total if total else 0.0

    def pair_keys(self) -> list[tuple[int, int]]:
        keys = set(self.canteen_coord) | set(self.office_coord) | set(self.miscoordination)
        return sorted(keys)

    def add_session(self, log: SessionLog) -> None:
        self.n_sessions += 1
        self.max_rounds = log.config.max_rounds
        self.endowment = log.config.endowment
        self.total_rounds += log.rounds_played
        self.ruined_players += sum(1 for b in log.final_balances if b <= 0)
        self.total_payoff += sum(max(0.0, b) for b in log.final_balances)
        self.total_penalty += sum(u for r in log.rounds for u in r.utilities)
        for r in log.rounds:
            key = _pair_key(r.pair)
            if r.miscoordinated():
                self.miscoordination[key] += 1
            elif r.actions[0] is Action.CANTEEN:
                self.canteen_coord[key] += 1
            else:
                self.office_coord[key] += 1


def run_monte_carlo(cfg: SessionConfig, p1: Policy, p2: Policy, n_sessions: int) -> SimStats:
    """Aggregate n_sessions independent seeded sessions.

    Session i runs with its own generator derived from (cfg.seed, i), so
    the aggregate is reproducible and sessions could run in any order.
    """
    if n_sessions < 1:
        raise ValueError("need at least one session")
    stats = SimStats()
    seeds = random.Random(cfg.seed)
    for _ in range(n_sessions):
        rand = random.Random(seeds.getrandbits(64))
        stats.add_session(run_session(cfg, p1, p2, rand))
    return stats


class SeparationError(ValueError):
    """Complete separation: the likelihood has no finite maximizer."""


@dataclass(frozen=True)
class LogitFit:
    """Maximum-likelihood logistic response P(canteen | t) = sigmoid(a + b t)."""

    alpha: float
    beta: float
    midpoint: float | None  # -alpha/beta in minutes, None when beta ~ 0
    iterations: int
    converged: bool

    @property
    def midpoint_clock(self) -> str | None:
        return None if self.midpoint is None else format_time(round(self.midpoint))


def fit_logit(
    observations: Sequence[tuple[int, Action]],
    max_iter: int = 100,
    grad_tol: float = 1e-8,
) -> LogitFit:
    """Fit the canteen-choice curve by damped Newton ascent.

    Raises SeparationError when the actions are perfectly split by a time
    threshold (no finite estimate exists) and ValueError for data without
    both actions or with a single distinct arrival time.
    """
    if not observations:
        raise ValueError("no observations")
    t = np.array([obs[0] for obs in observations], dtype=float)
    y = np.array([1.0 if obs[1] is Action.CANTEEN else 0.0 for obs in observations])
    canteen_t = t[y == 1]
    office_t = t[y == 0]
    if len(canteen_t) == 0 or len(office_t) == 0:
        raise ValueError("both actions must be represented")
    if len(set(t)) < 2:
        raise ValueError("need at least two distinct arrival times")
    if canteen_t.max() < office_t.min() or office_t.max() < canteen_t.min():
        raise SeparationError("actions are completely separated by arrival time")

    X = np.column_stack([np.ones_like(t), t])
    theta = np.zeros(2)

    def log_likelihood(th: np.ndarray) -> float:
        z = X @ th
        # log sigmoid(z) = -log(1 + exp(-z)), stable via logaddexp
        return float(np.sum(y * -np.logaddexp(0, -z) + (1 - y) * -np.logaddexp(0, z)))

    ll = log_likelihood(theta)
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        p = 1.0 / (1.0 + np.exp(-(X @ theta)))
        grad = X.T @ (y - p)
        if np.linalg.norm(grad) < grad_tol:
            converged = True
            break
        w = p * (1 - p)
        hessian = X.T @ (X * w[:, None])
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            step = grad
        lam = 1.0
        noise = 1e-9 * (1 + abs(ll))  # summation noise; keeps full Newton steps viable at the optimum
        while lam > 1e-10:
            candidate = theta + lam * step
            cand_ll = log_likelihood(candidate)
            if cand_ll >= ll - noise:
                theta, ll = candidate, max(ll, cand_ll)
                break
            lam /= 2
        else:
            break
    else:
        iterations = max_iter

    alpha, beta = float(theta[0]), float(theta[1])
    midpoint = -alpha / beta if abs(beta) > 1e-8 else None
    return LogitFit(alpha, beta, midpoint, iterations, converged)


def simulate_choices(
    policy: Policy, rng: TimeRange, n: int, rand: random.Random
) -> list[tuple[int, Action]]:
    """Draw n (arrival, action) observations with arrivals uniform on the grid."""
    times = rng.times()
    return [(t, policy.decide(t, rand)[0]) for t in (rand.choice(times) for _ in range(n))]
