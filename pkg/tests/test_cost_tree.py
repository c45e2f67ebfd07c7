import math

import numpy as np
import pytest

from sepcover.cost_tree import CostTree
from sepcover.cutting import build
from sepcover.geom import DEFAULT_EPS, disk_inside
from sepcover.instance import generate
from sepcover.solver import dualize


def make_tree(n, m, seed=0, r=None, exact=False, weights=None):
    inst = generate(n, m, seed)
    dual = dualize(inst, DEFAULT_EPS, exact)
    pts = inst.point_array()[dual.order]
    cen = dual.points
    r = r or max(1, min(n, math.ceil(math.sqrt(m))))
    cut = build(dual.family, r, seed=seed)
    leaf_of, fragile = cut.locate_many(cen[:, 0], cen[:, 1])

    def covers(d, ids):
        return disk_inside(cen[ids, 0], cen[ids, 1], pts[d, 0], pts[d, 1], inst.radius, DEFAULT_EPS, exact)

    w = list(weights) if weights is not None else [float(x) for x in inst.weights]
    return CostTree(cut, w, covers, leaf_of, fragile, exact), covers, w


def test_init_min_costs():
    tree, _, w = make_tree(40, 50)
    assert tree.min_cost[0] + tree.lam[0] == min(w)
    for leaf, qs in tree.pts.items():
        assert tree.min_cost[leaf] == min(w[q] for q in qs)
    assert tree.check(shadow=np.array(w)) == []


def test_empty_cells_stay_empty():
    tree, _, _ = make_tree(60, 10)
    empty = [c for c in range(len(tree.lam)) if not tree.nonempty[c]]
    assert empty  # ten points cannot fill every leaf
    assert all(tree.min_cost[c] == math.inf for c in empty)


def test_leaf_with_known_weights():
    tree, _, _ = make_tree(30, 3, weights=[5.0, 2.0, 9.0])
    leaf = int(tree.leaf_of[0])
    assert tree.min_cost[leaf] == min([5.0, 2.0, 9.0][q] for q in tree.pts[leaf])


def test_find_after_init_is_min_weight_inside():
    tree, covers, w = make_tree(40, 40, seed=2)
    for d in range(40):
        inside = np.flatnonzero(covers(d, np.arange(40)))
        alpha, q = tree.find_min_cost(d)
        if len(inside):
            assert alpha == min(w[i] for i in inside)
            assert q in inside
        else:
            assert alpha == math.inf and q == -1


def test_find_is_read_only():
    tree, _, _ = make_tree(30, 30, seed=3)
    before = tree.digest()
    tree.find_min_cost(5)
    assert tree.digest() == before


def test_reset_with_zero_is_invisible():
    tree, _, w = make_tree(30, 30, seed=4)
    tree.reset_cost(3, 0.0, 1)
    assert tree.check(shadow=np.array(w)) == []
    assert all(tree.cost(q) == w[q] for q in range(30))


@pytest.mark.parametrize("exact", [False, True])
def test_lockstep_against_shadow(exact):
    n = m = 30
    tree, covers, w = make_tree(n, m, seed=6, exact=exact)
    if exact:
        from sepcover.geom import to_fixed

        ints, _ = to_fixed(w)
        tree, covers, w = make_tree(n, m, seed=6, exact=True, weights=ints)
    shadow = np.array(w, dtype=object if exact else float)
    base = shadow.copy()
    tree.debug_drained = True
    for i in range(1, n + 1):
        d = i - 1
        inside = covers(d, np.arange(m))
        want = shadow[inside].min() if inside.any() else math.inf
        alpha, q = tree.find_min_cost(d)
        assert alpha == want or math.isclose(alpha, want, rel_tol=1e-12)
        if math.isinf(alpha):
            break
        tree.reset_cost(d, alpha, i)
        shadow[~inside] = base[~inside] + alpha
        assert tree.check(shadow) == []


def test_reset_when_region_contains_everything():
    tree, covers, w = make_tree(20, 20, seed=8)
    d = max(range(20), key=lambda d: covers(d, np.arange(20)).sum())
    if covers(d, np.arange(20)).all():
        before = tree.digest()
        tree.reset_cost(d, 7.0, 1)
        assert tree.digest() == before


def test_checkpoint_and_counters():
    tree, _, _ = make_tree(50, 50, seed=9)
    for d in range(10):
        alpha, _ = tree.find_min_cost(d)
        tree.reset_cost(d, alpha, d + 1)
    cp = tree.checkpoint()
    assert cp["iteration"] == 10
    assert set(cp) >= {"nonzero_lambda_per_level", "root_min_cost", "dirty_sizes"}
    assert tree.ops() > 0 and tree.counter_dict()["point_scans"] > 0
