"""Weighted unit-disk coverage for line-separable instances.

Points lie on or above the x-axis, disk centers on or below it, and all disks
share one radius.  The package offers an O(nm) dynamic program, an interval
sweep referee, a brute-force oracle and a subquadratic solver built on a
hierarchical cutting of the dual lower arcs.
"""

from sepcover.instance import CoverageInstance, HittingInstance, Solution
from sepcover.solver import (
    SolverConfig,
    solve,
    solve_fast,
    solve_halfplanes_lower,
    solve_hitting,
)
from sepcover.dp_naive import solve_naive
from sepcover.interval_oracle import solve_interval
from sepcover.bruteforce import brute_cover, brute_hit

__all__ = [
    "CoverageInstance",
    "HittingInstance",
    "Solution",
    "SolverConfig",
    "solve",
    "solve_fast",
    "solve_naive",
    "solve_interval",
    "solve_hitting",
    "solve_halfplanes_lower",
    "brute_cover",
    "brute_hit",
]

__version__ = "0.1.0"
