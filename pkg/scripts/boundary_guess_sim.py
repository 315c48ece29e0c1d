#!/usr/bin/env python3
"""Self-play of the guess-at-the-boundary rule: reproduce the pattern of
~50% miscoordination whenever one arrival sits on the 8:50 boundary."""

import argparse

from canteen.agents import Policy, SessionConfig, format_pair_key, run_monte_carlo
from canteen.game import TimeRange, parse_time


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=12_000)
    parser.add_argument("--seed", type=int, default=21)
    parser.add_argument("--guess-q", type=float, default=0.5)
    args = parser.parse_args()

    rng = TimeRange.parse("8:00", "9:10")
    guesser = Policy.mixed_guess(parse_time("8:50"), args.guess_q)
    sessions = max(1, args.rounds // 100)
    cfg = SessionConfig(range=rng, max_rounds=100, endowment=1e9, seed=args.seed)
    stats = run_monte_carlo(cfg, guesser, guesser, sessions)

    print(f"{stats.total_rounds} rounds of mixed:8:50:{args.guess_q:g} self-play\n")
    print(f"{'pair':<12}{'canteen':>9}{'office':>9}{'misses':>9}{'miss %':>9}")
    for key in stats.pair_keys():
        print(
            f"{format_pair_key(key):<12}"
            f"{stats.canteen_coord[key]:>9}"
            f"{stats.office_coord[key]:>9}"
            f"{stats.miscoordination[key]:>9}"
            f"{100 * stats.miscoordination_fraction(key):>8.1f}%"
        )


if __name__ == "__main__":
    main()
