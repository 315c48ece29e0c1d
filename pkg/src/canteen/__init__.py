"""Workbench for the Canteen Dilemma coordination game."""

from .game import (
    Action,
    ArrivalPair,
    ConfigError,
    TimeRange,
    arrival_pairs,
    components,
    deal,
    format_time,
    is_forbidden,
    parse_time,
)
from .scoring import Certainty, apply_round, best_report, penalty_ratio, utility

__all__ = [
    "Action",
    "ArrivalPair",
    "Certainty",
    "ConfigError",
    "TimeRange",
    "apply_round",
    "arrival_pairs",
    "best_report",
    "components",
    "deal",
    "format_time",
    "is_forbidden",
    "parse_time",
    "penalty_ratio",
    "utility",
]
