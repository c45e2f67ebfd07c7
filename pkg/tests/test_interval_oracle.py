import numpy as np
from hypothesis import given, settings

from sepcover.dp_naive import solve_naive
from sepcover.interval_oracle import Segment, build_segments, segments_from_matrix, solve_interval, solve_intervals

from conftest import raw_instances, small_instances


def test_two_maximal_runs():
    cov = np.array([[False, True, True, False, True]])
    segs = segments_from_matrix(cov, [1.0])
    assert [(s.left, s.right) for s in segs] == [(2, 3), (5, 5)]


def test_disk_covering_nothing():
    assert segments_from_matrix(np.zeros((1, 4), dtype=bool), [1.0]) == []


def test_one_full_segment():
    vals, _ = solve_intervals([Segment(0, 1, 5, 4)], 5)
    assert vals == [4] * 5


def test_forced_sum():
    vals, best = solve_intervals([Segment(0, 1, 1, 1), Segment(1, 2, 2, 1)], 2)
    assert vals[-1] == 2 and best == [0, 1]


def test_gap_is_infinite():
    vals, _ = solve_intervals([Segment(0, 1, 1, 1)], 2)
    assert vals == [1, float("inf")]


@settings(max_examples=60, deadline=None)
@given(small_instances(max_n=8, max_m=8))
def test_segments_match_containment(inst):
    cov = inst.coverage_matrix(order=inst.sorted_order())
    rebuilt = np.zeros_like(cov)
    for s in build_segments(inst):
        rebuilt[s.owner, s.left - 1 : s.right] = True
    assert (rebuilt == cov).all()
    per_owner = {}
    for s in build_segments(inst):
        per_owner.setdefault(s.owner, []).append((s.left, s.right))
    for runs in per_owner.values():
        assert all(a[1] + 1 < b[0] for a, b in zip(runs, runs[1:]))


@settings(max_examples=300, deadline=None)
@given(raw_instances())
def test_equals_naive_on_every_prefix(inst):
    assert solve_interval(inst, exact=True).prefix_values == solve_naive(inst, exact=True).prefix_values
