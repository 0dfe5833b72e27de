"""Cellular automaton engine and verification toolkit."""

from .config import BiPeriodicConfig, FinitePattern, PeriodicConfig
from .errors import InputError, ResourceError
from .report import DecisionReport
from .rule import CARule, apply_local

__all__ = [
    "BiPeriodicConfig",
    "CARule",
    "DecisionReport",
    "FinitePattern",
    "InputError",
    "PeriodicConfig",
    "ResourceError",
    "apply_local",
]
