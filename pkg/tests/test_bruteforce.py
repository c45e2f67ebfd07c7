import math

import pytest

from sepcover.bruteforce import MAX_ITEMS, BruteForceCapError, brute_cover, brute_hit
from sepcover.instance import CoverageInstance, HittingInstance, coverage_to_hitting, generate


def test_single_disk():
    assert brute_cover(CoverageInstance(1, [(0, 0.5)], [(0, -0.1)], [3])).weight == 3


def test_uncovered():
    res = brute_cover(CoverageInstance(1, [(0, 0.5)], [(4, -0.1)], [3]))
    assert res.weight == math.inf and not res.feasible


def test_abc(abc_instance):
    res = brute_cover(abc_instance)
    assert res.weight == 4 and res.subset == (1, 2) and res.count == 1


def test_hit_single():
    assert brute_hit(HittingInstance(1, [(0, 0.2)], [7], [(0, -0.5)])).weight == 7


def test_hit_empty_disk():
    assert brute_hit(HittingInstance(1, [(5, 0.2)], [7], [(0, -0.5)])).weight == math.inf


def test_hit_shared_cheap_point():
    hit = HittingInstance(1, [(0, 0.1), (0.3, 0.5), (-0.3, 0.5)], [1, 5, 5], [(0, -0.5), (0.2, -0.4), (-0.2, -0.4)])
    res = brute_hit(hit)
    assert res.weight == 1 and res.subset == (0,)


def test_cap():
    with pytest.raises(BruteForceCapError):
        brute_cover(generate(2, MAX_ITEMS + 1, 0))


def test_duality_on_examples():
    for seed in range(30):
        inst = generate(1 + seed % 7, 1 + seed % 9, seed)
        assert brute_cover(inst, exact=True).weight == brute_hit(coverage_to_hitting(inst), exact=True).weight
