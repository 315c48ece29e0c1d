"""Live two-seat sessions: state machine, timeouts, logging, and replay.

One session hosts one repeated game. Each seat is occupied by a human
(authenticated by an opaque token) or by a bot policy that the service
plays internally. A round walks the phase cycle

    waiting_for_players -> (round_deciding -> round_certainty ->
    round_results)* -> finished

with the decision and certainty phases defaulting late seats to
office / very-uncertain when their deadline passes, and the results page
auto-advancing. The session ends on ruin (a bankroll at or below zero,
with the ruinous round still scored and logged) or after the configured
number of rounds.

All server->client traffic goes through per-seat outboxes so a transport
can either push (persistent connection) or poll (cursor into the outbox).
A seat's outbox never contains the co-player's certainty, and contains
the co-player's arrival only inside round results.

The exported JSONL log carries one record per seat per round; every
penalty in it can be recomputed from the record fields alone, which
`verify_log` does.
"""

from __future__ import annotations

import json
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from . import game
from .agents import Policy, SessionConfig
from .game import Action, ArrivalPair, format_time
from .scoring import Certainty, display_dollars, utility


class Phase(str, Enum):
    WAITING = "waiting_for_players"
    DECIDING = "round_deciding"
    CERTAINTY = "round_certainty"
    RESULTS = "round_results"
    FINISHED = "finished"


class ProtocolError(Exception):
    """Client-visible failure with a stable error code."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(detail or code)
        self.code = code
        self.detail = detail or code

    def to_message(self) -> dict:
        return {"type": "error", "code": self.code, "detail": self.detail}


@dataclass(frozen=True)
class Timings:
    """Phase deadlines in seconds. Instruction reading is advisory only:
    the deadline is reported to clients but never enforced here."""

    decision: float = 61.0
    certainty: float = 61.0
    results: float = 30.0
    instructions: float = 240.0


POSTGAME_SAFE_TIME_OPTIONS = (
    "I don't know",
    "There is no such time",
    "8:00",
    "8:10",
    "8:20",
    "8:30",
    "8:40",
    "8:50",
    "9:00",
    "9:10",
)
POSTGAME_COMMON_KNOWLEDGE_OPTIONS = ("Yes", "No", "Don't know")
POSTGAME_FAULT_OPTIONS = ("My fault", "Other's fault", "Other reason")


@dataclass
class SeatState:
    seat: int
    token: str
    code: str  # public participant id used in exported logs
    policy: Policy | None = None  # bot occupant
    joined: bool = False
    connected: bool = False
    bankroll: float = 0.0
    arrival: int | None = None
    decision: Action | None = None
    certainty: Certainty | None = None
    pending_bot_certainty: Certainty | None = None
    outbox: list[dict] = field(default_factory=list)
    postgame: dict = field(default_factory=dict)

    @property
    def is_bot(self) -> bool:
        return self.policy is not None

    def send(self, message: dict) -> None:
        if not self.is_bot:
            self.outbox.append(message)


@dataclass
class RoundRecord:
    round: int
    arrivals: tuple[int, int]
    actions: tuple[Action, Action]
    certainties: tuple[Certainty, Certainty]
    penalties: tuple[float, float]
    bankrolls: tuple[float, float]


@dataclass
class Session:
    sid: str
    cfg: SessionConfig
    timings: Timings
    rng: random.Random
    seats: dict[int, SeatState]
    phase: Phase = Phase.WAITING
    round_index: int = 0
    deadline: float | None = None
    pair: ArrivalPair | None = None
    records: list[RoundRecord] = field(default_factory=list)
    finish_reason: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


class SessionService:
    """Holds many independent sessions; per-session mutations are serialized
    through the session lock, so transports may call in from any thread."""

    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()

    # -- lifecycle ----------------------------------------------------------

    def create_session(self, cfg: SessionConfig, timings: Timings | None = None) -> str:
        session = Session(
            sid=_new_id("session"),
            cfg=cfg,
            timings=timings or Timings(),
            rng=random.Random(cfg.seed),
            seats={
                seat: SeatState(seat=seat, token=uuid.uuid4().hex, code=_new_id("p"))
                for seat in (1, 2)
            },
        )
        for seat in session.seats.values():
            seat.bankroll = cfg.endowment
        with self._registry_lock:
            self._sessions[session.sid] = session
        return session.sid

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            return list(self._sessions)

    def seat_token(self, sid: str, seat: int) -> str:
        session = self._get(sid)
        return self._seat(session, seat).token

    def _get(self, sid: str) -> Session:
        with self._registry_lock:
            try:
                return self._sessions[sid]
            except KeyError:
                raise ProtocolError("unknown_session", f"no session {sid!r}") from None

    @staticmethod
    def _seat(session: Session, seat: int) -> SeatState:
        if seat not in session.seats:
            raise ProtocolError("unknown_seat", f"seats are 1 and 2, got {seat!r}")
        return session.seats[seat]

    # -- joining ------------------------------------------------------------

    def join_bot(self, sid: str, seat: int, policy: Policy, now: float | None = None) -> None:
        session = self._get(sid)
        with session.lock:
            state = self._seat(session, seat)
            if state.joined:
                raise ProtocolError("seat_taken", f"seat {seat} is already occupied")
            state.policy = policy
            state.joined = True
            state.connected = True
            self._maybe_start(session, self._now(now))

    def join(self, sid: str, seat: int, token: str, now: float | None = None) -> dict:
        """Occupy (or reconnect to) a human seat; returns a state snapshot."""
        session = self._get(sid)
        with session.lock:
            state = self._seat(session, seat)
            if state.is_bot:
                raise ProtocolError("seat_taken", f"seat {seat} is played by a bot")
            if token != state.token:
                raise ProtocolError("bad_token", "seat token does not match")
            first_join = not state.joined
            state.joined = True
            state.connected = True
            now = self._now(now)
            snapshot = {
                "type": "joined",
                "seat": seat,
                "phase": session.phase.value,
                "round": session.round_index,
                "rounds": session.cfg.max_rounds,
                "endowment": display_dollars(session.cfg.endowment),
                "bankrolls": self._public_bankrolls(session),
                "instructions_deadline_ms": int(session.timings.instructions * 1000),
            }
            state.send(snapshot)
            if first_join:
                self._maybe_start(session, now)
            return snapshot

    def authenticate(self, sid: str, seat: int, token: str) -> SeatState:
        session = self._get(sid)
        state = self._seat(session, seat)
        if state.is_bot or token != state.token:
            raise ProtocolError("bad_token", "seat token does not match")
        return state

    def _maybe_start(self, session: Session, now: float) -> None:
        if session.phase is Phase.WAITING and all(s.joined for s in session.seats.values()):
            self._start_round(session, now)

    # -- round flow ---------------------------------------------------------

    @staticmethod
    def _now(now: float | None) -> float:
        return time.time() if now is None else now

    def _public_bankrolls(self, session: Session) -> list[float]:
        return [display_dollars(session.seats[i].bankroll) for i in (1, 2)]

    def _start_round(self, session: Session, now: float) -> None:
        session.round_index += 1
        session.pair = game.deal(session.cfg.range, session.rng)
        session.phase = Phase.DECIDING
        session.deadline = now + session.timings.decision
        for state in session.seats.values():
            state.arrival = session.pair.arrival(state.seat)
            state.decision = None
            state.certainty = None
            state.pending_bot_certainty = None
            state.send(
                {
                    "type": "round_start",
                    "round": session.round_index,
                    "your_arrival": format_time(state.arrival),
                    "deadline_ms": int(session.timings.decision * 1000),
                }
            )
        self._run_bots(session, now)

    def _run_bots(self, session: Session, now: float) -> None:
        if session.phase is Phase.DECIDING:
            for state in session.seats.values():
                if state.is_bot and state.decision is None:
                    action, certainty = state.policy.decide(state.arrival, session.rng)
                    state.decision = action
                    state.pending_bot_certainty = certainty
            if all(s.decision is not None for s in session.seats.values()):
                self._enter_certainty(session, now)
        if session.phase is Phase.CERTAINTY:
            for state in session.seats.values():
                if state.is_bot and state.certainty is None:
                    state.certainty = state.pending_bot_certainty
            if all(s.certainty is not None for s in session.seats.values()):
                self._score_round(session, now)

    def _enter_certainty(self, session: Session, now: float) -> None:
        session.phase = Phase.CERTAINTY
        session.deadline = now + session.timings.certainty
        for state in session.seats.values():
            if state.certainty is None:
                state.send(
                    {
                        "type": "phase",
                        "phase": Phase.CERTAINTY.value,
                        "deadline_ms": int(session.timings.certainty * 1000),
                    }
                )

    def _score_round(self, session: Session, now: float) -> None:
        pair = session.pair
        s1, s2 = session.seats[1], session.seats[2]
        u1 = utility(s1.certainty, s1.decision, s2.decision, pair.t1, pair.t2)
        u2 = utility(s2.certainty, s2.decision, s1.decision, pair.t2, pair.t1)
        s1.bankroll += u1
        s2.bankroll += u2
        session.records.append(
            RoundRecord(
                round=session.round_index,
                arrivals=(pair.t1, pair.t2),
                actions=(s1.decision, s2.decision),
                certainties=(s1.certainty, s2.certainty),
                penalties=(u1, u2),
                bankrolls=(s1.bankroll, s2.bankroll),
            )
        )
        session.phase = Phase.RESULTS
        session.deadline = now + session.timings.results
        arrivals = [format_time(pair.t1), format_time(pair.t2)]
        actions = [str(s1.decision), str(s2.decision)]
        for state, own_u in ((s1, u1), (s2, u2)):
            state.send(
                {
                    "type": "round_result",
                    "round": session.round_index,
                    "arrivals": arrivals,
                    "actions": actions,
                    "your_certainty": str(state.certainty),
                    "your_penalty": display_dollars(own_u),
                    "bankrolls": self._public_bankrolls(session),
                }
            )

    def _finish(self, session: Session, reason: str) -> None:
        session.phase = Phase.FINISHED
        session.finish_reason = reason
        session.deadline = None
        for state in session.seats.values():
            state.send(
                {
                    "type": "game_over",
                    "reason": reason,
                    "final_bonus": display_dollars(max(0.0, state.bankroll)),
                }
            )

    def advance(self, sid: str, now: float | None = None) -> Phase:
        """Apply any due deadline transition and return the current phase.

        Driving a bot-filled session only needs repeated advance calls with
        increasing timestamps; humans never do, it is the transport ticker's
        job.
        """
        session = self._get(sid)
        with session.lock:
            now = self._now(now)
            if session.deadline is not None and now >= session.deadline:
                if session.phase is Phase.DECIDING:
                    for state in session.seats.values():
                        if state.decision is None:
                            state.decision = Action.OFFICE
                            state.certainty = Certainty.VERY_UNCERTAIN
                    self._enter_certainty(session, now)
                    self._run_bots(session, now)
                    if session.phase is Phase.CERTAINTY and all(
                        s.certainty is not None for s in session.seats.values()
                    ):
                        self._score_round(session, now)
                elif session.phase is Phase.CERTAINTY:
                    for state in session.seats.values():
                        if state.certainty is None:
                            state.certainty = Certainty.VERY_UNCERTAIN
                    self._score_round(session, now)
                elif session.phase is Phase.RESULTS:
                    if any(s.bankroll <= 0 for s in session.seats.values()):
                        self._finish(session, "ruin")
                    elif session.round_index >= session.cfg.max_rounds:
                        self._finish(session, "completed")
                    else:
                        self._start_round(session, now)
            return session.phase

    # -- submissions --------------------------------------------------------

    def submit_decision(
        self, sid: str, seat: int, action: Action, now: float | None = None
    ) -> None:
        session = self._get(sid)
        with session.lock:
            state = self._seat(session, seat)
            if session.phase is not Phase.DECIDING:
                raise ProtocolError(
                    "wrong_phase", f"decisions are not accepted during {session.phase.value}"
                )
            if state.decision is not None:
                raise ProtocolError("duplicate_submission", "decision already recorded")
            state.decision = action
            now = self._now(now)
            if all(s.decision is not None for s in session.seats.values()):
                self._enter_certainty(session, now)
                self._run_bots(session, now)

    def submit_certainty(
        self, sid: str, seat: int, level: Certainty, now: float | None = None
    ) -> None:
        session = self._get(sid)
        with session.lock:
            state = self._seat(session, seat)
            if session.phase is not Phase.CERTAINTY:
                raise ProtocolError(
                    "wrong_phase", f"certainty is not accepted during {session.phase.value}"
                )
            if state.certainty is not None:
                raise ProtocolError("duplicate_submission", "certainty already recorded")
            state.certainty = level
            if all(s.certainty is not None for s in session.seats.values()):
                self._score_round(session, self._now(now))

    def submit_postgame(self, sid: str, seat: int, answers: dict) -> None:
        """Store the post-game questionnaire; only valid once the game ended."""
        session = self._get(sid)
        with session.lock:
            state = self._seat(session, seat)
            if session.phase is not Phase.FINISHED:
                raise ProtocolError("wrong_phase", "the game is not finished")
            allowed = {
                "strategy": None,  # free text
                "cutoff": POSTGAME_SAFE_TIME_OPTIONS,
                "simple": POSTGAME_COMMON_KNOWLEDGE_OPTIONS,
                "fault": POSTGAME_FAULT_OPTIONS,
            }
            for key, value in answers.items():
                if key not in allowed:
                    raise ProtocolError("invalid_answer", f"unknown question {key!r}")
                options = allowed[key]
                if options is not None and value not in options:
                    raise ProtocolError("invalid_answer", f"{value!r} is not an option for {key}")
            state.postgame.update(answers)

    # -- views and logs -----------------------------------------------------

    def poll(self, sid: str, seat: int, token: str, cursor: int) -> tuple[list[dict], int]:
        """Outbox slice from cursor onward; replaying from 0 rebuilds state."""
        session = self._get(sid)
        with session.lock:
            state = self._seat(session, seat)
            if state.is_bot or token != state.token:
                raise ProtocolError("bad_token", "seat token does not match")
            cursor = max(0, cursor)
            return list(state.outbox[cursor:]), len(state.outbox)

    def state_summary(self, sid: str) -> dict:
        session = self._get(sid)
        with session.lock:
            return {
                "session": sid,
                "phase": session.phase.value,
                "round": session.round_index,
                "rounds": session.cfg.max_rounds,
                "finish_reason": session.finish_reason,
                "bankrolls": self._public_bankrolls(session),
                "seats_joined": [s.seat for s in session.seats.values() if s.joined],
            }

    def export_log(self, sid: str) -> list[str]:
        """JSONL rows, one per seat per round, in the dataset column order."""
        session = self._get(sid)
        with session.lock:
            lines = []
            for record in session.records:
                for idx, state in ((0, session.seats[1]), (1, session.seats[2])):
                    row: dict = {
                        "session": session.sid,
                        "code": state.code,
                        "group": 1,
                        "id_in_group": state.seat,
                        "round": record.round,
                        "arrival": format_time(record.arrivals[idx]),
                        "choice": str(record.actions[idx]),
                        "certainty": str(record.certainties[idx]),
                        "bonus": display_dollars(record.penalties[idx]),
                    }
                    row.update(state.postgame)
                    row["payoff"] = display_dollars(max(0.0, state.bankroll))
                    row["bonus_exact"] = record.penalties[idx]
                    row["payoff_exact"] = state.bankroll
                    lines.append(json.dumps(row))
            return lines


def run_bot_session(
    service: SessionService,
    cfg: SessionConfig,
    p1: Policy,
    p2: Policy,
    timings: Timings | None = None,
) -> str:
    """Create a session, seat two bots, and drive it to completion with
    synthetic timestamps (no sleeping)."""
    sid = service.create_session(cfg, timings or Timings())
    service.join_bot(sid, 1, p1, now=0.0)
    service.join_bot(sid, 2, p2, now=0.0)
    now = 0.0
    step = (timings or Timings()).results + 1.0
    for _ in range(cfg.max_rounds + 2):
        now += step
        if service.advance(sid, now=now) is Phase.FINISHED:
            break
    else:
        raise AssertionError("bot session failed to terminate")
    return sid


def verify_log(lines: Iterable[str]) -> list[str]:
    """Replay an exported log through the scoring rule.

    Returns human-readable diffs; an empty list means every penalty
    recomputes exactly (and to the displayed cent), the two seats' rows
    imply one consistent endowment, and final payoffs match the penalty
    totals.
    """
    rows = [json.loads(line) for line in lines if line.strip()]
    diffs: list[str] = []
    by_round: dict[tuple[str, int], dict[int, dict]] = {}
    for row in rows:
        by_round.setdefault((row["session"], row["round"]), {})[row["id_in_group"]] = row

    totals: dict[tuple[str, int], float] = {}
    finals: dict[tuple[str, int], float] = {}
    for (sid, round_no), seats in sorted(by_round.items(), key=lambda kv: kv[0][1]):
        if set(seats) != {1, 2}:
            diffs.append(f"round {round_no}: missing a seat record")
            continue
        for seat_no in (1, 2):
            row = seats[seat_no]
            other = seats[3 - seat_no]
            u = utility(
                Certainty.parse(row["certainty"]),
                Action.parse(row["choice"]),
                Action.parse(other["choice"]),
                game.parse_time(row["arrival"]),
                game.parse_time(other["arrival"]),
            )
            exact = row.get("bonus_exact", row["bonus"])
            if abs(u - exact) > 1e-9:
                diffs.append(
                    f"round {round_no} seat {seat_no}: bonus {exact} but scoring gives {u:.6f}"
                )
            if display_dollars(u) != row["bonus"]:
                diffs.append(
                    f"round {round_no} seat {seat_no}: displayed bonus {row['bonus']} "
                    f"is not {u:.6f} to the cent"
                )
            key = (sid, seat_no)
            totals[key] = totals.get(key, 0.0) + exact
            finals[key] = row.get("payoff_exact", row["payoff"])

    implied = {key: finals[key] - totals[key] for key in finals}
    by_session: dict[str, list[float]] = {}
    for (sid, _), endowment in implied.items():
        by_session.setdefault(sid, []).append(endowment)
    for sid, endowments in by_session.items():
        if max(endowments) - min(endowments) > 1e-6:
            diffs.append(f"session {sid}: seats imply different endowments {endowments}")
        if min(endowments) <= 0:
            diffs.append(f"session {sid}: implied endowment {min(endowments)} is not positive")
    return diffs
