"""The O(nm) dynamic program with linear-scan FindMinCost and ResetCost."""

from __future__ import annotations

import math
import time

import numpy as np

from sepcover.geom import DEFAULT_EPS, disk_inside, from_fixed, to_fixed
from sepcover.instance import CoverageInstance, Solution


def weight_domain(weights, exact: bool):
    """Weights as floats, or as integers over a shared power-of-two denominator."""
    if exact:
        ints, shift = to_fixed(weights)
        return ints, shift
    return [float(w) for w in weights], None


def convert_out(value, shift):
    return float(value) if shift is None else from_fixed(value, shift)


def run_dp(cov: np.ndarray, weights) -> tuple[list, list[int], list[int]]:
    """Run the prefix recurrence on a disk-by-point coverage matrix.

    ``cov[s, i]`` tells whether disk ``s`` covers the i-th point from the left.
    Returns the prefix values and, per point, the disk attaining the minimum
    (-1 when none covers it) and the iteration that last reset that disk's cost.
    """
    return run_dp_columns(lambda i: cov[:, i], cov.shape[1], weights)


def run_dp_columns(column, n: int, weights) -> tuple[list, list[int], list[int]]:
    """Same as :func:`run_dp` with the coverage column of point i produced by ``column(i)``."""
    m = len(weights)
    dtype = object if weights and isinstance(weights[0], int) else float
    w = np.array(weights, dtype=dtype)
    cost = w.copy()
    last = np.zeros(m, dtype=np.int64)
    prefix, arg, prov = [], [], []
    for i in range(n):
        col = column(i)
        idx = np.flatnonzero(col)
        if len(idx):
            k = int(np.argmin(cost[idx]))  # first minimum: smallest disk index wins ties
            s = int(idx[k])
            delta = cost[s]
            arg.append(s)
            prov.append(int(last[s]))
        else:
            delta = math.inf
            arg.append(-1)
            prov.append(0)
        prefix.append(delta)
        out = ~col
        cost[out] = w[out] + delta
        last[out] = i + 1
    return prefix, arg, prov


def backtrack(arg: list[int], prov: list[int]) -> list[int]:
    """Walk from the last prefix back to a disk whose cost was its own weight."""
    chosen: list[int] = []
    seen: set[int] = set()
    i = len(arg)
    while i > 0:
        s = arg[i - 1]
        assert s >= 0, "backtracking reached an uncovered prefix"
        assert s not in seen, f"disk {s} selected twice while backtracking"
        seen.add(s)
        chosen.append(s)
        i = prov[i - 1]
    return chosen


def solve_matrix(cov: np.ndarray, weights, exact: bool = False, solver: str = "naive") -> Solution:
    return solve_columns(lambda i: cov[:, i], cov.shape[1], weights, exact, solver)


def solve_columns(column, n: int, weights, exact: bool = False, solver: str = "naive") -> Solution:
    m = len(weights)
    w, shift = weight_domain(weights, exact)
    t0 = time.perf_counter()
    prefix, arg, prov = run_dp_columns(column, n, w)
    stats = {"ops": n * m, "seconds": time.perf_counter() - t0}
    prefix_out = [convert_out(v, shift) for v in prefix]
    if n == 0:
        return Solution(True, convert_out(0, shift) if exact else 0.0, [], [], solver, exact, stats)
    if math.isinf(prefix[-1]):
        return Solution.infeasible(prefix_out, solver, exact, stats)
    chosen = backtrack(arg, prov)
    return Solution(True, prefix_out[-1], chosen, prefix_out, solver, exact, stats)


def solve_naive(inst: CoverageInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> Solution:
    """Prefix dynamic program over the points sorted left to right."""
    pts = inst.point_array()[inst.sorted_order()]
    cen = inst.center_array()

    def column(i):
        return disk_inside(pts[i, 0], pts[i, 1], cen[:, 0], cen[:, 1], inst.radius, eps, exact)

    return solve_columns(column, inst.n, inst.weights, exact)
