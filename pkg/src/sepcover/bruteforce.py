"""Exhaustive subset enumeration; the ground truth for tiny instances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sepcover.dp_naive import convert_out, weight_domain
from sepcover.geom import DEFAULT_EPS, disk_inside
from sepcover.instance import CoverageInstance, HittingInstance

MAX_ITEMS = 22


class BruteForceCapError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    weight: object  # float, Fraction or inf
    subset: tuple[int, ...]
    count: int  # number of optimal subsets

    @property
    def feasible(self) -> bool:
        return not (isinstance(self.weight, float) and math.isinf(self.weight))


def brute_matrix(cov: np.ndarray, weights, exact: bool = False) -> OracleResult:
    """Cheapest set of rows of ``cov`` whose union covers every column."""
    m, n = cov.shape
    if m > MAX_ITEMS:
        raise BruteForceCapError(f"{m} candidates exceeds the brute-force cap of {MAX_ITEMS}")
    w, shift = weight_domain(weights, exact)
    full = (1 << n) - 1
    masks = [sum(1 << i for i in np.flatnonzero(row).tolist()) for row in cov]
    size = 1 << m
    cover = [0] * size
    total = [0] * size
    best, best_mask, count = math.inf, 0, 0
    if full == 0:
        best, count = 0, 1
    for mask in range(1, size):
        low = mask & -mask
        b = low.bit_length() - 1
        prev = mask ^ low
        cover[mask] = c = cover[prev] | masks[b]
        total[mask] = t = total[prev] + w[b]
        if c == full:
            if t < best:
                best, best_mask, count = t, mask, 1
            elif t == best:
                count += 1
    if math.isinf(best):
        return OracleResult(math.inf, (), 0)
    subset = tuple(i for i in range(m) if best_mask >> i & 1)
    return OracleResult(convert_out(best, shift), subset, count)


def brute_cover(inst: CoverageInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> OracleResult:
    if inst.m > MAX_ITEMS:
        raise BruteForceCapError(f"m={inst.m} exceeds the brute-force cap of {MAX_ITEMS}")
    return brute_matrix(inst.coverage_matrix(eps, exact), inst.weights, exact)


def brute_hit(hit: HittingInstance, eps: float = DEFAULT_EPS, exact: bool = False) -> OracleResult:
    """Cheapest set of points such that every disk contains one of them."""
    if hit.n > MAX_ITEMS:
        raise BruteForceCapError(f"n={hit.n} exceeds the brute-force cap of {MAX_ITEMS}")
    pts = np.array(hit.points, dtype=float).reshape(-1, 2)
    cen = np.array(hit.centers, dtype=float).reshape(-1, 2)
    # rows: points (the candidates), columns: disks (the constraints)
    cov = disk_inside(pts[:, None, 0], pts[:, None, 1], cen[None, :, 0], cen[None, :, 1], hit.radius, eps, exact)
    return brute_matrix(cov.reshape(hit.n, hit.m), hit.weights, exact)
