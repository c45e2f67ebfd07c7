"""Fast solver over the dual arrangement, plus the hitting-set and halfplane adapters.

A disk s covers point p exactly when the equal-radius disk centered at p
covers the center of s.  The points of P (sorted by x) become dual regions
and the disk centers become weighted dual points; the prefix recurrence is
then driven by a cutting of the dual boundaries and the lazy cost tree.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from sepcover import cutting as cutting_mod
from sepcover.cost_tree import INF, CostTree
from sepcover.dp_naive import backtrack, convert_out, solve_matrix, solve_naive, weight_domain
from sepcover.geom import DEFAULT_EPS, ArcFamily, LineFamily, disk_inside, halfplane_inside
from sepcover.instance import (
    CoverageInstance,
    HalfplaneInstance,
    HittingInstance,
    Solution,
    hitting_to_coverage,
)
from sepcover.interval_oracle import solve_interval, solve_interval_matrix

SOLVERS = ("naive", "interval", "fast", "auto")
AUTO_NAIVE_LIMIT = 250_000  # n*m below which "auto" uses the plain scan


class UnsupportedInstance(ValueError):
    """The instance falls outside the problem class the solver handles."""


@dataclass(frozen=True)
class SolverConfig:
    r: int | None = None
    rho: int = 4
    seed: int = 0
    eps: float = DEFAULT_EPS
    exact: bool = False
    debug_invariants: bool = False
    shadow: bool = False
    sample_factor: float = 1.0

    def pick_r(self, n: int, m: int) -> int:
        if self.r is not None:
            if not 1 <= self.r <= max(n, 1):
                raise ValueError(f"r must lie in [1, {n}], got {self.r}")
            return self.r
        return max(1, min(math.ceil(math.sqrt(m)), n))


@dataclass(frozen=True)
class DualInstance:
    family: object  # ArcFamily or LineFamily over the sorted points
    points: np.ndarray  # dual points, one row per disk (or halfplane)
    weights: tuple
    order: np.ndarray  # original index of the i-th dual region

    @property
    def n(self) -> int:
        return self.family.size

    @property
    def m(self) -> int:
        return len(self.points)


def dualize(inst: CoverageInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> DualInstance:
    """Dual regions centered at the sorted points; dual points at the disk centers.

    In float mode the dual radius is widened to sqrt(R^2 + eps), which is the
    exact shape of the tolerant membership test.
    """
    order = inst.sorted_order()
    pts = inst.point_array()[order]
    radius = inst.radius if exact else math.sqrt(inst.radius**2 + eps)
    return DualInstance(ArcFamily(pts, radius), inst.center_array(), inst.weights, order)


def dualize_halfplanes(inst: HalfplaneInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> DualInstance:
    """Halfplane (a, b) covers (px, py) iff b >= -px*a + py: a line per point in (a, b) space."""
    pts = np.array(inst.points, dtype=float).reshape(-1, 2)
    order = np.argsort(pts[:, 0], kind="stable")
    pts = pts[order]
    shift = 0.0 if exact else eps
    fam = LineFamily(-pts[:, 0], pts[:, 1] - shift)
    return DualInstance(fam, np.array(inst.halfplanes, dtype=float).reshape(-1, 2), inst.weights, order)


def _run(dual: DualInstance, covers, config: SolverConfig, solver: str) -> Solution:
    t0 = time.perf_counter()
    n, m = dual.n, dual.m
    w, shift = weight_domain(dual.weights, config.exact)
    if n == 0:
        zero = convert_out(0, shift) if config.exact else 0.0
        return Solution(True, zero, [], [], solver, config.exact, {"ops": 0, "seconds": 0.0})
    if m == 0:
        prefix = [math.inf] * n
        return Solution.infeasible(prefix, solver, config.exact, {"ops": 0, "seconds": 0.0})
    r = config.pick_r(n, m)
    cut = cutting_mod.build(dual.family, r, config.rho, config.seed, config.sample_factor)
    leaf_of, fragile = cut.locate_many(dual.points[:, 0], dual.points[:, 1])
    tree = CostTree(cut, w, covers, leaf_of, fragile, config.exact)
    debug = config.debug_invariants
    tree.debug_drained = debug
    shadow = None
    if debug or config.shadow:
        shadow = np.array(w, dtype=object if config.exact else float)
        wv = shadow.copy()
    violations: list[str] = []
    prefix, arg, prov = [], [], []
    all_ids = np.arange(m)
    for i in range(1, n + 1):
        d = i - 1
        before = tree.digest() if debug else None
        alpha, q = tree.find_min_cost(d)
        if debug and tree.digest() != before:
            violations.append(f"iteration {i}: find_min_cost changed the state")
        if shadow is not None:
            inside = covers(d, all_ids)
            want = shadow[inside].min() if inside.any() else INF
            if want != alpha and not (not config.exact and math.isclose(want, alpha, rel_tol=1e-9)):
                violations.append(f"iteration {i}: alpha {alpha} != shadow {want}")
        if alpha == INF:
            prefix.extend([math.inf] * (n - d))
            break
        prefix.append(alpha)
        arg.append(q)
        prov.append(tree.last_reset(q))
        tree.reset_cost(d, alpha, i)
        if shadow is not None:
            shadow[~inside] = wv[~inside] + alpha
            if debug:
                violations.extend(f"iteration {i}: {v}" for v in tree.check(shadow))
    stats = {
        "ops": tree.ops(),
        "r": r,
        "cutting": cut.stats(),
        "counters": tree.counter_dict(),
        "seconds": time.perf_counter() - t0,
    }
    if debug or config.shadow:
        stats["invariant_violations"] = len(violations)
        stats["violation_samples"] = violations[:20]
    prefix_out = [convert_out(v, shift) for v in prefix]
    if len(arg) < n:
        return Solution.infeasible(prefix_out, solver, config.exact, stats)
    chosen = backtrack(arg, prov)
    return Solution(True, prefix_out[-1], chosen, prefix_out, solver, config.exact, stats)


def solve_fast(inst: CoverageInstance, config: SolverConfig | None = None) -> Solution:
    """Prefix recurrence driven by the cutting and the lazy cost tree."""
    config = config or SolverConfig()
    dual = dualize(inst, config.eps, config.exact)
    pts = inst.point_array()[dual.order]
    cen = dual.points
    R, eps, exact = inst.radius, config.eps, config.exact

    def covers(d, ids):
        return disk_inside(cen[ids, 0], cen[ids, 1], pts[d, 0], pts[d, 1], R, eps, exact)

    return _run(dual, covers, config, "fast")


def solve_hitting(hit: HittingInstance, config: SolverConfig | None = None) -> Solution:
    """Cheapest set of points meeting every disk; ``chosen`` indexes points."""
    sol = solve_fast(hitting_to_coverage(hit), config)
    return Solution(sol.feasible, sol.total_weight, sol.chosen, sol.prefix_values, "fast-hitting", sol.exact, sol.stats)


def solve_halfplanes_lower(inst: HalfplaneInstance, config: SolverConfig | None = None, solver: str = "fast") -> Solution:
    """Cover the points with lower halfplanes of least total weight."""
    if not inst.lower_only:
        raise UnsupportedInstance(
            "upper halfplanes present: general (mixed upper/lower) halfplane coverage is not supported"
        )
    config = config or SolverConfig()
    if solver in ("naive", "interval"):
        order = np.argsort(np.array(inst.points, dtype=float).reshape(-1, 2)[:, 0], kind="stable")
        cov = inst.coverage_matrix(config.eps, config.exact, order)
        run = solve_matrix if solver == "naive" else solve_interval_matrix
        return run(cov, inst.weights, config.exact, solver)
    dual = dualize_halfplanes(inst, config.eps, config.exact)
    pts = np.array(inst.points, dtype=float).reshape(-1, 2)[dual.order]
    hp = dual.points
    eps, exact = config.eps, config.exact

    def covers(d, ids):
        return halfplane_inside(pts[d, 0], pts[d, 1], hp[ids, 0], hp[ids, 1], eps, exact)

    return _run(dual, covers, config, "fast")


def solve(inst, solver: str = "auto", config: SolverConfig | None = None) -> Solution:
    """Dispatch on solver name and instance kind."""
    config = config or SolverConfig()
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
    if isinstance(inst, HalfplaneInstance):
        return solve_halfplanes_lower(inst, config, "fast" if solver == "auto" else solver)
    if isinstance(inst, HittingInstance):
        if solver in ("naive", "interval"):
            sol = solve(hitting_to_coverage(inst), solver, config)
            return Solution(sol.feasible, sol.total_weight, sol.chosen, sol.prefix_values, sol.solver, sol.exact, sol.stats)
        return solve_hitting(inst, config)
    if solver == "auto":
        solver = "naive" if inst.n * inst.m <= AUTO_NAIVE_LIMIT else "fast"
    if solver == "naive":
        return solve_naive(inst, config.eps, config.exact)
    if solver == "interval":
        return solve_interval(inst, config.eps, config.exact)
    return solve_fast(inst, config)
