"""Solve U_n + U_m = x^q over non-degenerate binary recurrence sequences."""
from .bounds import EffectiveBounds, derive_constants, gap_bound, lower_bound_constants, search_bound
from .config import Settings, load_settings
from .errors import RecurrencePowerError
from .recurrence import RecurrenceSequence, make_sequence, resolve_sequence, term
from .solver import Solution, SolutionSet, brute_search, solve_fixed_x

__version__ = "0.1.0"

__all__ = [
    "EffectiveBounds",
    "RecurrencePowerError",
    "RecurrenceSequence",
    "Settings",
    "Solution",
    "SolutionSet",
    "brute_search",
    "derive_constants",
    "gap_bound",
    "load_settings",
    "lower_bound_constants",
    "make_sequence",
    "resolve_sequence",
    "search_bound",
    "solve_fixed_x",
    "term",
]
