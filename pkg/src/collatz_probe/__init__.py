"""Collatz (3x+1) verification and conjecture-probing toolkit."""

from .core import (
    StepLimitExceeded,
    StoppingProfile,
    TrajectoryProfile,
    collatz_step,
    flight_profile,
    oe_ratio,
    stopping_profile,
)
from .sieve import AffineClass, SieveTable, advance, build_sieve, is_skippable

__all__ = [
    "AffineClass",
    "SieveTable",
    "StepLimitExceeded",
    "StoppingProfile",
    "TrajectoryProfile",
    "advance",
    "build_sieve",
    "collatz_step",
    "flight_profile",
    "is_skippable",
    "oe_ratio",
    "stopping_profile",
]
