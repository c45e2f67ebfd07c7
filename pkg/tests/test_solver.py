import math

import numpy as np
import pytest
from hypothesis import given, settings

from sepcover.bruteforce import brute_cover, brute_hit, brute_matrix
from sepcover.dp_naive import solve_naive
from sepcover.geom import disk_contains, Disk, Point
from sepcover.instance import CoverageInstance, HalfplaneInstance, HittingInstance, generate, generate_halfplanes
from sepcover.interval_oracle import solve_interval
from sepcover.solver import (
    SolverConfig,
    UnsupportedInstance,
    dualize,
    solve,
    solve_fast,
    solve_halfplanes_lower,
    solve_hitting,
)

from conftest import raw_instances, small_instances


class TestDualize:
    @pytest.mark.parametrize("seed", range(5))
    def test_containment_matrix_is_preserved(self, seed):
        inst = generate(20, 20, seed)
        dual = dualize(inst, 0.0, exact=True)
        pts = inst.point_array()[dual.order]
        for s, (cx, cy) in enumerate(inst.centers):
            for i, (px, py) in enumerate(pts):
                primal = disk_contains(Disk(Point(cx, cy), inst.radius), Point(px, py), exact=True)
                dual_side = dual.family.contains_exact(i, cx, cy)
                assert primal == dual_side

    def test_single_pair(self):
        inst = CoverageInstance(1, [(0, 0.5)], [(0.2, -0.3)], [1])
        dual = dualize(inst)
        assert dual.n == dual.m == 1
        assert bool(dual.family.value(0, 0.2, -0.3) <= 0)


class TestSolveFast:
    def test_abc(self, abc_instance):
        sol = solve_fast(abc_instance)
        assert sol.total_weight == 4 and sorted(sol.chosen) == [1, 2]

    def test_uncovered_point(self):
        inst = generate(15, 15, 2, infeasible=True)
        sol = solve_fast(inst)
        assert not sol.feasible and sol.total_weight == math.inf

    def test_point_too_high_for_any_disk(self):
        inst = CoverageInstance(1, [(0, 0.5), (1, 1.5)], [(0, -0.1), (1, 0)], [1, 1])
        assert not solve_fast(inst).feasible

    def test_agrees_at_2000(self):
        inst = generate(2000, 2000, seed=11)
        a = solve_naive(inst)
        b = solve_fast(inst)
        c = solve_interval(inst)
        assert b.total_weight == pytest.approx(a.total_weight, rel=1e-9)
        assert c.total_weight == pytest.approx(a.total_weight, rel=1e-9)

    def test_deterministic(self):
        inst = generate(200, 150, 3)
        assert solve_fast(inst, SolverConfig(seed=4)).to_dict()["chosen"] == solve_fast(inst, SolverConfig(seed=4)).to_dict()["chosen"]

    def test_r_override_and_bounds(self):
        inst = generate(50, 60, 1)
        assert solve_fast(inst, SolverConfig(r=50)).stats["r"] == 50
        with pytest.raises(ValueError):
            solve_fast(inst, SolverConfig(r=51))

    def test_default_r(self):
        assert SolverConfig().pick_r(10, 400) == 10
        assert SolverConfig().pick_r(100, 400) == 20
        assert SolverConfig().pick_r(100, 401) == 21

    def test_debug_invariants_clean(self):
        sol = solve_fast(generate(80, 80, 5, "clustered"), SolverConfig(debug_invariants=True, exact=True))
        assert sol.stats["invariant_violations"] == 0

    def test_points_on_the_line_and_boundaries(self):
        # centers on the axis and points exactly on disk boundaries
        inst = CoverageInstance(
            1.0,
            [(0, 0), (1, 0), (2, 1.0), (3, 0.5)],
            [(0, 0), (1, -1.0), (2, 0), (3, -0.5), (2.5, 0)],
            [3, 1, 2, 2, 4],
        )
        for exact in (False, True):
            cfg = SolverConfig(exact=exact, debug_invariants=True)
            assert solve_fast(inst, cfg).prefix_values == solve_naive(inst, exact=exact).prefix_values

    @settings(max_examples=200, deadline=None)
    @given(raw_instances())
    def test_matches_naive_on_degenerate_grids(self, inst):
        for exact in (False, True):
            a = solve_naive(inst, exact=exact)
            b = solve_fast(inst, SolverConfig(exact=exact, r=max(1, min(inst.n, 2))))
            assert a.prefix_values == b.prefix_values
            assert a.feasible == b.feasible

    @settings(max_examples=60, deadline=None)
    @given(small_instances(max_n=12, max_m=12))
    def test_matches_brute_force(self, inst):
        sol = solve_fast(inst, SolverConfig(exact=True))
        assert sol.total_weight == brute_cover(inst, exact=True).weight


class TestHitting:
    def test_single_point(self):
        sol = solve_hitting(HittingInstance(1, [(0, 0.2)], [7], [(0, -0.5)]))
        assert sol.chosen == [0] and sol.total_weight == 7

    def test_disk_without_points(self):
        assert not solve_hitting(HittingInstance(1, [(5, 0.2)], [7], [(0, -0.5)])).feasible

    @pytest.mark.parametrize("seed", range(10))
    def test_random_10x10(self, seed):
        from sepcover.instance import generate_hitting

        hit = generate_hitting(10, 10, seed)
        assert solve_hitting(hit, SolverConfig(exact=True)).total_weight == brute_hit(hit, exact=True).weight


class TestHalfplanes:
    def test_one_halfplane_covers_both(self):
        inst = HalfplaneInstance([(0, 0), (1, 0.5)], [(0, 1)], [3])
        assert solve_halfplanes_lower(inst).total_weight == 3

    def test_two_forced(self):
        inst = HalfplaneInstance([(0, 0), (10, 0)], [(1, -1), (-1, 9)], [1, 1])
        assert solve_halfplanes_lower(inst).total_weight == 2

    def test_upper_rejected(self):
        inst = HalfplaneInstance([(0, 0)], [(0, -1)], [1], ("upper",))
        with pytest.raises(UnsupportedInstance, match="general"):
            solve_halfplanes_lower(inst)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_10x10(self, seed):
        inst = generate_halfplanes(10, 10, seed)
        cov = inst.coverage_matrix(exact=True)
        want = brute_matrix(cov, inst.weights, exact=True).weight
        for solver in ("fast", "naive", "interval"):
            assert solve_halfplanes_lower(inst, SolverConfig(exact=True), solver).total_weight == want


def test_dispatch():
    inst = generate(10, 10, 1)
    for name in ("naive", "interval", "fast", "auto"):
        assert solve(inst, name).total_weight == pytest.approx(solve_naive(inst).total_weight)
    with pytest.raises(ValueError):
        solve(inst, "magic")
