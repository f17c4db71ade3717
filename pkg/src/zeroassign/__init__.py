"""Invariant zero assignment for square linear systems.

Given a controllable pair ``(A, B)`` and a target polynomial, synthesize an
output matrix ``H`` such that ``det [[sI - A, -B], [H, 0]]`` is a nonzero
multiple of the target, and verify the result independently.
"""

from .assigner import (
    AssignmentReport,
    AssignmentRequest,
    CollisionPolicy,
    assign_zeros,
    polynomial_from_zeros,
    verify_assignment,
)
from .numkit import Polynomial, Tolerance
from .placement import RandomPolicy
from .sysmodel import StateSpaceSystem, invariant_zeros, load_system, save_system

__all__ = [
    "AssignmentReport",
    "AssignmentRequest",
    "CollisionPolicy",
    "Polynomial",
    "RandomPolicy",
    "StateSpaceSystem",
    "Tolerance",
    "assign_zeros",
    "invariant_zeros",
    "load_system",
    "polynomial_from_zeros",
    "save_system",
    "verify_assignment",
]

__version__ = "0.1.0"
