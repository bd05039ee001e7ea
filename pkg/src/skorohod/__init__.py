"""Exact Skorohod J1 geometry for step functions and paths of step functions."""

from .errors import DomainError, SizeError, SkorohodError, ValidationError
from .cadlag import Interval, StepFunction, TimeChange, make_step

__all__ = [
    "DomainError",
    "SizeError",
    "SkorohodError",
    "ValidationError",
    "Interval",
    "StepFunction",
    "TimeChange",
    "make_step",
]
