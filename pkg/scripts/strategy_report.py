#!/usr/bin/env python3
"""Print the full strategy picture for a range: EU of every cut-off,
the enumerated Pareto front, and the safety scan."""

import argparse

from canteen.game import TimeRange, format_time
from canteen.strategies import UtilityModel, eu_by_cutoff, pareto_front, safe_profiles


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tmin", default="8:10")
    parser.add_argument("--tmax", default="9:10")
    args = parser.parse_args()
    rng = TimeRange.parse(args.tmin, args.tmax)
    model = UtilityModel.log_score()

    print(f"range {rng}\n")
    print("expected utility per round (log scoring, constant 0.99 certainty):")
    for label, eu in eu_by_cutoff(rng, model):
        print(f"  {label:<14} {eu:>10.4f}   (10-round bankroll from $10: {10 + 10 * eu:6.2f})")

    report = pareto_front(rng, model)
    print(f"\nPareto front EU: {report.combined_eu:.4f}")
    print(f"lemma1={report.lemma1_ok} lemma2={report.lemma2_ok} theorem1={report.theorem1_ok}")

    safe = safe_profiles(rng)
    print(f"\nsafe profiles found by exhaustive scan: {len(safe)}")
    for profile in safe:
        actions = {format_time(t): str(a) for t, a in zip(profile.s1.times, profile.s1.actions)}
        print(f"  {actions}")


if __name__ == "__main__":
    main()
