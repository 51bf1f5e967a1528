"""Exact Max-2-SAT by branch and reduce, with a measure-based step counter."""

from .formula import Formula, VarGraph, satisfied_count
from .measure import COMBINED, SIMPLE, WeightTable, branching_number, gamma
from .oracle import brute_force
from .reduction import ReductionTrace, is_reduced, reduce
from .solver import NodeCapExceeded, SearchStats, Solution, SolverConfig, solve

__all__ = [
    "Formula",
    "VarGraph",
    "satisfied_count",
    "WeightTable",
    "SIMPLE",
    "COMBINED",
    "gamma",
    "branching_number",
    "brute_force",
    "ReductionTrace",
    "reduce",
    "is_reduced",
    "SolverConfig",
    "SearchStats",
    "Solution",
    "NodeCapExceeded",
    "solve",
]

__version__ = "0.1.0"
