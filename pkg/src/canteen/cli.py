"""Command-line entry point.

Subcommands: analyze (strategy fronts and EU tables), epistemic
(knowledge-label and message-chain tables), simulate (Monte Carlo policy
self-play), serve (live session servers), replay (log verification).

Machine output is CSV on stdout; --out DIR additionally writes the same
CSVs to files, and --pretty appends a human-readable summary. Every
subcommand is deterministic given its flags and seed; CANTEEN_SEED in the
environment overrides --seed.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path

from .agents import SessionConfig, run_monte_carlo
from .epistemic import label_table, message_chain_model, common_knowledge
from .game import Action, ConfigError, TimeRange, format_time
from .server import POLICY_GRAMMAR, ServerBundle, parse_policy
from .service import verify_log
from .strategies import Strategy, UtilityModel, eu_by_cutoff, pareto_front


def _time_range(args) -> TimeRange:
    return TimeRange.parse(args.tmin, args.tmax)


def _seed(args) -> int:
    env = os.environ.get("CANTEEN_SEED")
    return int(env) if env else args.seed


def _actions_string(s: Strategy) -> str:
    return "".join("c" if a is Action.CANTEEN else "o" for a in s.actions)


class _Outputs:
    """Collects named CSV sections; prints to stdout and optionally to files."""

    def __init__(self, out_dir: str | None):
        self.out_dir = Path(out_dir) if out_dir else None
        self.sections: list[tuple[str, str]] = []

    def add(self, name: str, text: str) -> None:
        self.sections.append((name, text))

    def flush(self) -> None:
        for i, (name, text) in enumerate(self.sections):
            if i:
                sys.stdout.write("\n")
            sys.stdout.write(text)
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            for name, text in self.sections:
                (self.out_dir / name).write_text(text, encoding="utf-8")
            for name, _ in self.sections:
                print(f"wrote {self.out_dir / name}", file=sys.stderr)


def cmd_analyze(args) -> int:
    rng = _time_range(args)
    model = UtilityModel.log_score()
    report = pareto_front(rng, model)

    front = io.StringIO()
    front.write(f"# range,{format_time(rng.tmin)},{format_time(rng.tmax)}\n")
    front.write(f"# lemma1_ok,{report.lemma1_ok}\n")
    front.write(f"# lemma2_ok,{report.lemma2_ok}\n")
    front.write(f"# theorem1_ok,{report.theorem1_ok}\n")
    front.write(f"# combined_eu_per_round,{report.combined_eu:.6f}\n")
    front.write("component,times1,actions1,times2,actions2,eu\n")
    for idx, comp in enumerate(report.fronts, start=1):
        for profile in comp.profiles:
            front.write(
                ",".join(
                    [
                        str(idx),
                        "|".join(format_time(t) for t in profile.s1.times),
                        _actions_string(profile.s1),
                        "|".join(format_time(t) for t in profile.s2.times),
                        _actions_string(profile.s2),
                        f"{comp.eu:.6f}",
                    ]
                )
                + "\n"
            )

    eu_table = io.StringIO()
    eu_table.write("strategy,expected_utility_per_round\n")
    for label, eu in eu_by_cutoff(rng, model):
        eu_table.write(f"{label},{eu:.6f}\n")

    outputs = _Outputs(args.out)
    outputs.add("analyze_front.csv", front.getvalue())
    outputs.add("analyze_eu.csv", eu_table.getvalue())
    outputs.flush()

    if args.pretty:
        names = sorted(
            {
                "all-office" if set(p.s1.actions) == {Action.OFFICE} else "cutoff-8:55"
                for comp in report.fronts
                for p in comp.profiles
            }
        )
        print()
        print(f"Pareto front on {rng}: {', '.join(names)}")
        print(f"expected utility per round: {report.combined_eu:.4f}")
        print(
            "structure checks: "
            f"lemma1={report.lemma1_ok} lemma2={report.lemma2_ok} "
            f"theorem1={report.theorem1_ok}"
        )
    return 0


def cmd_epistemic(args) -> int:
    rng = _time_range(args)
    labels = io.StringIO()
    labels.write("arrival_time,label\n")
    for arrival, label in label_table(rng):
        labels.write(f"{arrival},{label}\n")

    chain = io.StringIO()
    chain.write("delivered_messages,shared_depth,common_knowledge_empty\n")
    for k in range(args.chain + 1):
        model, depth = message_chain_model(k)
        delivered = model.proposition(m for m in model.worlds if m >= 1)
        empty = common_knowledge(model, delivered) == frozenset()
        chain.write(f"{k},{depth},{empty}\n")

    outputs = _Outputs(args.out)
    outputs.add("epistemic_labels.csv", labels.getvalue())
    outputs.add("message_chain.csv", chain.getvalue())
    outputs.flush()

    if args.pretty:
        print()
        print(f"knowledge ladder on {rng}:")
        for arrival, label in label_table(rng):
            print(f"  {arrival:>5}  {label}")
    return 0


def cmd_simulate(args) -> int:
    rng = _time_range(args)
    try:
        p1 = parse_policy(args.policy1)
        p2 = parse_policy(args.policy2)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg = SessionConfig(
        range=rng, max_rounds=args.rounds, endowment=args.endowment, seed=_seed(args)
    )
    stats = run_monte_carlo(cfg, p1, p2, args.sessions)

    table = io.StringIO()
    table.write("N,R,rounds_avg,ruin_pct,payoff_pct,penalty_avg_usd\n")
    table.write(
        f"{stats.n_players},{stats.max_rounds},{stats.rounds_played_avg:.2f},"
        f"{100 * stats.ruin_rate:.1f},{100 * stats.payoff_retained:.1f},"
        f"{stats.avg_penalty_per_round:.2f}\n"
    )

    pairs = io.StringIO()
    pairs.write("pair,canteen_coordination,office_coordination,miscoordination,miscoordination_frac\n")
    for key in stats.pair_keys():
        from .agents import format_pair_key

        pairs.write(
            f"{format_pair_key(key)},{stats.canteen_coord[key]},{stats.office_coord[key]},"
            f"{stats.miscoordination[key]},{stats.miscoordination_fraction(key):.3f}\n"
        )

    outputs = _Outputs(args.out)
    outputs.add("simulate_stats.csv", table.getvalue())
    outputs.add("simulate_pairs.csv", pairs.getvalue())
    outputs.flush()

    if args.pretty:
        print()
        print(
            f"{p1.describe()} vs {p2.describe()}: {args.sessions} sessions of "
            f"{args.rounds} rounds on {rng}"
        )
        print(
            f"  avg rounds {stats.rounds_played_avg:.2f}, ruin {100 * stats.ruin_rate:.1f}%, "
            f"payoff retained {100 * stats.payoff_retained:.1f}%, "
            f"avg penalty/round ${stats.avg_penalty_per_round:.2f}"
        )
    return 0


def cmd_serve(args) -> int:
    static = Path(args.static) if args.static else None
    if static is not None and not static.is_dir():
        print(f"error: static directory {static} does not exist", file=sys.stderr)
        return 1
    bundle = ServerBundle(
        wire_port=args.port,
        http_port=args.http_port,
        static_dir=static,
        host=args.host,
    )
    bundle.start()
    print(f"wire protocol on {args.host}:{bundle.wire.port}")
    print(f"http api on http://{args.host}:{bundle.http.port}/api/sessions")
    if static is not None:
        print(f"browser client at http://{args.host}:{bundle.http.port}/")
    try:
        import threading

        threading.Event().wait()
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        bundle.stop()
    return 0


def cmd_replay(args) -> int:
    path = Path(args.logfile)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    diffs = verify_log(lines)
    for diff in diffs:
        print(diff)
    if not diffs:
        rounds = sum(1 for line in lines if line.strip())
        print(f"ok: {rounds} records verified, 0 diffs", file=sys.stderr)
    return 0 if not diffs else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canteen",
        description="Canteen Dilemma workbench: analysis, simulation, and live play.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_range(p, tmin="8:10", tmax="9:10"):
        p.add_argument("--tmin", default=tmin, help=f"earliest arrival (default {tmin})")
        p.add_argument("--tmax", default=tmax, help=f"latest arrival (default {tmax})")

    def add_common(p):
        p.add_argument("--out", metavar="DIR", default=None, help="also write CSVs to DIR")
        p.add_argument("--pretty", action="store_true", help="append a human-readable summary")

    p = sub.add_parser("analyze", help="Pareto front, EU table, and structure checks")
    add_range(p)
    add_common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("epistemic", help="knowledge-depth labels and message-chain depths")
    add_range(p)
    p.add_argument("--chain", type=int, default=10, help="max delivered messages (default 10)")
    add_common(p)
    p.set_defaults(fn=cmd_epistemic)

    p = sub.add_parser("simulate", help="seeded Monte Carlo policy self-play")
    add_range(p, tmin="8:00", tmax="9:10")
    p.add_argument("--policy1", default="all_office", help=POLICY_GRAMMAR)
    p.add_argument("--policy2", default="all_office", help=POLICY_GRAMMAR)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--endowment", type=float, default=10.0)
    p.add_argument("--sessions", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0, help="overridden by CANTEEN_SEED")
    add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("serve", help="run the live session servers")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=9000, help="wire-protocol TCP port")
    p.add_argument("--http-port", type=int, default=9001, help="HTTP API / client port")
    p.add_argument("--static", metavar="DIR", default=None, help="serve a browser client from DIR")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("replay", help="verify an exported JSONL log")
    p.add_argument("logfile")
    p.set_defaults(fn=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
