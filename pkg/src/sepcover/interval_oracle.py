"""Reduction to weighted interval coverage and its sweep dynamic program.

Each disk contributes one segment per maximal run of consecutive (sorted)
points it covers.  Sweeping the projected points left to right with a min-heap
of active segments gives an independent computation of every prefix value.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from sepcover.dp_naive import convert_out, weight_domain
from sepcover.geom import DEFAULT_EPS
from sepcover.instance import CoverageInstance, Solution


@dataclass(frozen=True)
class Segment:
    owner: int
    left: int  # 1-based index of the first covered point
    right: int  # 1-based index of the last covered point
    weight: float | int


def segments_from_matrix(cov: np.ndarray, weights) -> list[Segment]:
    m, n = cov.shape
    padded = np.zeros((m, n + 2), dtype=np.int8)
    padded[:, 1 : n + 1] = cov
    step = np.diff(padded, axis=1)
    s_rows, s_cols = np.nonzero(step == 1)
    e_rows, e_cols = np.nonzero(step == -1)
    assert np.array_equal(s_rows, e_rows)
    return [
        Segment(int(s), int(a) + 1, int(b), weights[s])
        for s, a, b in zip(s_rows.tolist(), s_cols.tolist(), e_cols.tolist())
    ]


def build_segments(inst: CoverageInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> list[Segment]:
    cov = inst.coverage_matrix(eps, exact, inst.sorted_order())
    return segments_from_matrix(cov, list(inst.weights))


def solve_intervals(segments: list[Segment], n: int) -> tuple[list, list[int | None]]:
    """Prefix optima of the interval coverage problem.

    At each index segments starting there are activated first, then the
    minimum active cost is read, then segments ending there are retired.
    Returns the prefix values for i = 1..n and the id of the segment attaining
    each one (None where the prefix cannot be covered).
    """
    starts: list[list[int]] = [[] for _ in range(n + 2)]
    ends: list[list[int]] = [[] for _ in range(n + 2)]
    for sid, seg in enumerate(segments):
        starts[seg.left].append(sid)
        ends[seg.right].append(sid)
    delta = [0] + [math.inf] * n
    best: list[int | None] = [None] * (n + 1)
    active = bytearray(len(segments))
    heap: list = []
    for i in range(1, n + 1):
        for sid in starts[i]:
            seg = segments[sid]
            # rightmost point strictly left of the segment is left - 1, already final
            cost = seg.weight + delta[seg.left - 1]
            active[sid] = 1
            heapq.heappush(heap, (cost, seg.owner, sid))
        while heap and not active[heap[0][2]]:
            heapq.heappop(heap)
        if heap:
            delta[i] = heap[0][0]
            best[i] = heap[0][2]
        for sid in ends[i]:
            active[sid] = 0
    return delta[1:], best[1:]


def solve_interval(inst: CoverageInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> Solution:
    cov = inst.coverage_matrix(eps, exact, inst.sorted_order())
    return solve_interval_matrix(cov, inst.weights, exact)


def solve_interval_matrix(cov: np.ndarray, weights, exact: bool = False, solver: str = "interval") -> Solution:
    m, n = cov.shape
    w, shift = weight_domain(weights, exact)
    t0 = time.perf_counter()
    segs = segments_from_matrix(cov, w)
    prefix, best = solve_intervals(segs, n)
    stats = {"segments": len(segs), "seconds": time.perf_counter() - t0}
    out = [convert_out(v, shift) for v in prefix]
    if n == 0:
        return Solution(True, convert_out(0, shift) if exact else 0.0, [], [], solver, exact, stats)
    if math.isinf(prefix[-1]):
        return Solution.infeasible(out, solver, exact, stats)
    chosen: list[int] = []
    i = n
    while i > 0:
        seg = segs[best[i - 1]]
        assert seg.owner not in chosen, f"disk {seg.owner} selected twice"
        chosen.append(seg.owner)
        i = seg.left - 1
    return Solution(True, out[-1], chosen, out, solver, exact, stats)
