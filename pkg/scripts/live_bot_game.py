#!/usr/bin/env python3
"""Run a live session with two bot seats through the session service,
export its JSONL log, and verify the log replays exactly."""

import argparse
import sys

from canteen.agents import SessionConfig
from canteen.game import TimeRange
from canteen.server import parse_policy
from canteen.service import SessionService, run_bot_session, verify_log


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--policy1", default="before9")
    parser.add_argument("--policy2", default="mixed:8:50:0.5")
    parser.add_argument("--rounds", type=int, default=10)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--log", default=None, help="write the JSONL log here")
    args = parser.parse_args()

    service = SessionService()
    cfg = SessionConfig(
        range=TimeRange.parse("8:00", "9:10"),
        max_rounds=args.rounds,
        endowment=10.0,
        seed=args.seed,
    )
    sid = run_bot_session(service, cfg, parse_policy(args.policy1), parse_policy(args.policy2))
    summary = service.state_summary(sid)
    print(f"finished: {summary['finish_reason']} after round {summary['round']}, "
          f"bankrolls {summary['bankrolls']}")

    lines = service.export_log(sid)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.log} ({len(lines)} records)")
    diffs = verify_log(lines)
    print(f"replay diffs: {len(diffs)}")
    for diff in diffs:
        print(" ", diff)
    return 0 if not diffs else 1


if __name__ == "__main__":
    sys.exit(main())
