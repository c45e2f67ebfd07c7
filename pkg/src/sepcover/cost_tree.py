"""Lazy cost bookkeeping over a hierarchical cutting.

Every dual point q carries cost(q) = w(q) + lam(q) + sum of lam over the
cells on its leaf's root path.  ``min_cost[c]`` is the smallest
w(q) + lam(q) + (lam of the cells strictly below c on q's path) over the
points below c, so the cheapest point of a cell costs min_cost plus the lam
sum over its own root path.  Resetting a whole cell means draining its dirty
list (zeroing every lam set below it) and then writing one lam value on the
cell itself.

Points the cutting flags as boundary-hugging are kept out of the tree and
handled by direct scans; there are none under general position.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter

import numpy as np

from sepcover.cutting import INSIDE, OUTSIDE, HierCutting
from sepcover.heap import IndexedMinHeap

INF = math.inf

COUNTERS = ("point_scans", "cell_scans", "list_appends", "heap_ops", "walk_steps", "drained")


class CostTree:
    def __init__(self, cutting: HierCutting, weights, covers, leaf_of, fragile, exact: bool = False):
        """``covers(d, ids)`` decides membership of dual points ``ids`` in dual region ``d``."""
        self.cut = cutting
        self.covers = covers
        self.exact = exact
        cells = cutting.cells
        nc = len(cells)
        self.m = m = len(weights)
        dtype = object if exact else float
        self.w = np.array(weights, dtype=dtype).reshape(m)
        zero = 0 if exact else 0.0
        self.zero = zero
        self.lam_pt = np.full(m, zero, dtype=dtype)
        self.lam = [zero] * nc
        self.min_cost: list = [INF] * nc
        self.arg_pt = [-1] * nc  # argmin point below the cell
        self.arg_child = [-1] * nc
        self.dirty: list[list[int]] = [[] for _ in range(nc)]  # points as q, cells as ~c
        self.stamp_pt = [0] * m
        self.stamp = [0] * nc
        self.parent = [-1 if c.parent is None else c.parent for c in cells]
        self.children = [c.children for c in cells]
        self.path = [c.path for c in cells]
        self.is_leaf = [c.level == cutting.k for c in cells]
        self.leaf_of = np.asarray(leaf_of, dtype=np.int64)
        fragile = np.asarray(fragile, dtype=bool)
        self.overflow = np.flatnonzero(fragile)
        self.ov_cost = self.w[self.overflow].copy()
        self.ov_stamp = np.zeros(len(self.overflow), dtype=np.int64)
        self.counters: Counter = Counter(dict.fromkeys(COUNTERS, 0))
        self.pts: dict[int, np.ndarray] = {}
        self.heaps: dict[int, IndexedMinHeap] = {}
        tree_pts = np.flatnonzero(~fragile)
        order = tree_pts[np.argsort(self.leaf_of[tree_pts], kind="stable")]
        if len(order):
            cuts = np.flatnonzero(np.diff(self.leaf_of[order])) + 1
            for grp in np.split(order, cuts):
                leaf = int(self.leaf_of[grp[0]])
                self.pts[leaf] = np.sort(grp)
                self.heaps[leaf] = IndexedMinHeap((int(q), self.w[q]) for q in grp)
        self.nonempty = [False] * nc
        for cid in range(nc - 1, -1, -1):  # children always have larger ids
            if self.is_leaf[cid]:
                self.nonempty[cid] = cid in self.heaps
            else:
                self.nonempty[cid] = any(self.nonempty[ch] for ch in self.children[cid])
            if self.nonempty[cid]:
                self._recompute(cid)
        self.iteration = 0
        self.debug_drained = False
        self._regions_cache = None
        self._mask_cache: dict[int, np.ndarray] = {}

    # -- helpers -----------------------------------------------------------

    def _recompute(self, cid: int) -> None:
        if self.is_leaf[cid]:
            key, q = self.heaps[cid].peek()
            self.min_cost[cid], self.arg_pt[cid], self.arg_child[cid] = key, q, -1
            return
        best, bq, bc = INF, -1, -1
        lam, mc, ap = self.lam, self.min_cost, self.arg_pt
        for ch in self.children[cid]:
            if not self.nonempty[ch]:
                continue
            v = mc[ch] + lam[ch]
            if v < best or (v == best and ap[ch] < bq):
                best, bq, bc = v, ap[ch], ch
        self.min_cost[cid], self.arg_pt[cid], self.arg_child[cid] = best, bq, bc

    def _propagate(self, cid: int, stop: int = -1) -> None:
        """``cid``'s minCost or lam changed: refresh every ancestor, or up to ``stop``.

        Only the changed child is compared at each step; a full rescan of the
        children happens when the previous argmin child got worse.
        """
        lam, mc, ap, ac, parent = self.lam, self.min_cost, self.arg_pt, self.arg_child, self.parent
        steps = 0
        while cid != stop:
            p = parent[cid]
            if p < 0:
                break
            steps += 1
            v, q = mc[cid] + lam[cid], ap[cid]
            cur = mc[p]
            if v < cur or (v == cur and q < ap[p]):
                mc[p], ap[p], ac[p] = v, q, cid
            elif ac[p] == cid:
                self._recompute(p)
            cid = p
        self.counters["walk_steps"] += steps

    def _leaf_changed(self, leaf: int, stop: int = -1) -> None:
        self._recompute(leaf)
        self._propagate(leaf, stop)

    def path_sum(self, cid: int):
        lam = self.lam
        s = self.zero
        for c in self.path[cid]:
            s = s + lam[c]
        return s

    def cost(self, q: int):
        """cost(q) as defined by the lam representation."""
        pos = np.searchsorted(self.overflow, q)
        if pos < len(self.overflow) and self.overflow[pos] == q:
            return self.ov_cost[pos]
        return self.w[q] + self.lam_pt[q] + self.path_sum(int(self.leaf_of[q]))

    def last_reset(self, q: int) -> int:
        """Iteration at which cost(q) was last written (0 = initial weight)."""
        pos = np.searchsorted(self.overflow, q)
        if pos < len(self.overflow) and self.overflow[pos] == q:
            return int(self.ov_stamp[pos])
        leaf = int(self.leaf_of[q])
        return max(self.stamp_pt[q], max(self.stamp[c] for c in self.path[leaf]))

    def _regions(self, d: int):
        """Crossed leaves, and (parent path sum, child) for each uncrossed child below a crossed cell.

        The answer is cached until the next reset, since finding does not
        touch the state.
        """
        if self._regions_cache is not None and self._regions_cache[0] == d:
            return self._regions_cache[1]
        out = self._compute_regions(d)
        self._regions_cache = (d, out)
        self._mask_cache = {}
        return out

    def _leaf_mask(self, d: int, leaf: int, qs: np.ndarray) -> np.ndarray:
        """Which points of ``leaf`` lie in region ``d``; shared by find and reset."""
        mask = self._mask_cache.get(leaf)
        if mask is None:
            mask = self._mask_cache[leaf] = self.covers(d, qs)
        return mask

    def _compute_regions(self, d: int):
        cut = self.cut
        crossed = cut.disk_cells[d]
        leaves, whole = [], []
        if not crossed or crossed[0] != 0:
            # the region misses the root altogether: the root is one uncrossed piece
            rx, ry = cut.root.rep
            inside = bool(cut.family.value(d, rx, ry) <= 0)
            if self.nonempty[0]:
                whole.append((self.zero, 0, INSIDE if inside else OUTSIDE))
            return leaves, whole
        inner = []
        for c in crossed:
            (leaves if self.is_leaf[c] else inner).append(c)
        if inner:
            owner, kids, inside = cut.uncrossed_children(inner, d, crossed)
            sums: dict[int, object] = {}
            for o, ch, f in zip(owner.tolist(), kids.tolist(), inside.tolist()):
                if not self.nonempty[ch]:
                    continue
                s = sums.get(o)
                if s is None:
                    s = sums[o] = self.path_sum(inner[o])
                whole.append((s, ch, INSIDE if f else OUTSIDE))
        return leaves, whole

    # -- operations --------------------------------------------------------

    def find_min_cost(self, d: int):
        """(alpha, argmin point) over the dual points inside region ``d``; (inf, -1) if none."""
        best, bq = INF, -1
        leaves, whole = self._regions(d)
        for leaf in leaves:
            qs = self.pts.get(leaf)
            if qs is None:
                continue
            self.counters["point_scans"] += len(qs)
            inq = qs[self._leaf_mask(d, leaf, qs)]
            if len(inq) == 0:
                continue
            vals = self.w[inq] + self.lam_pt[inq] + self.path_sum(leaf)
            k = int(np.argmin(vals))
            v, q = vals[k], int(inq[k])
            if v < best or (v == best and q < bq):
                best, bq = v, q
        for s, ch, tag in whole:
            if tag != INSIDE:
                continue
            self.counters["cell_scans"] += 1
            v = self.min_cost[ch] + self.lam[ch] + s
            q = self.arg_pt[ch]
            if v < best or (v == best and q < bq):
                best, bq = v, q
        if len(self.overflow):
            self.counters["point_scans"] += len(self.overflow)
            mask = self.covers(d, self.overflow)
            if mask.any():
                vals = self.ov_cost[mask]
                k = int(np.argmin(vals))
                v, q = vals[k], int(self.overflow[mask][k])
                if v < best or (v == best and q < bq):
                    best, bq = v, q
        return best, bq

    def argmin_in(self, cid: int) -> int:
        """Follow the stored argchild pointers down to the cheapest point."""
        while not self.is_leaf[cid]:
            cid = self.arg_child[cid]
        return self.arg_pt[cid]

    def reset_cost(self, d: int, delta, i: int) -> None:
        """Make cost(q) = w(q) + delta for every dual point outside region ``d``."""
        self.iteration = i
        leaves, whole = self._regions(d)
        self._regions_cache = None
        for leaf in leaves:
            qs = self.pts.get(leaf)
            if qs is None:
                continue
            self.counters["point_scans"] += len(qs)
            out = qs[~self._leaf_mask(d, leaf, qs)]
            if len(out) == 0:
                continue
            val = delta - self.path_sum(leaf)
            heap = self.heaps[leaf]
            path = self.path[leaf]
            out_ids = out.tolist()
            self.lam_pt[out] = val
            for q in out_ids:
                heap.update(q, self.w[q] + val)
                self.stamp_pt[q] = i
            if val != 0:
                for a in path:
                    self.dirty[a].extend(out_ids)
                self.counters["list_appends"] += len(path) * len(out_ids)
            self.counters["heap_ops"] += len(out)
            self._leaf_changed(leaf)
        for s, ch, tag in whole:
            if tag != OUTSIDE:
                continue
            self._drain(ch)
            val = delta - s
            self.lam[ch] = val
            self.stamp[ch] = i
            if val != 0:
                for a in self.path[ch][:-1]:
                    self.dirty[a].append(~ch)
                self.counters["list_appends"] += len(self.path[ch]) - 1
            self._propagate(ch)
            if self.debug_drained:
                self.check_drained(ch)
        if len(self.overflow):
            out = ~self.covers(d, self.overflow)
            self.ov_cost[out] = self.w[self.overflow[out]] + delta
            self.ov_stamp[out] = i

    def _drain(self, cid: int) -> None:
        """Zero every lam recorded in the dirty list of ``cid`` and refresh minCosts below it.

        Each touched leaf or cell is refreshed once, after all of its entries
        have been zeroed; the outcome equals refreshing after every entry.
        """
        items = self.dirty[cid]
        self.dirty[cid] = []
        self.counters["drained"] += len(items)
        leaves: dict[int, None] = {}
        cells: dict[int, None] = {}
        for e in items:
            if e >= 0:
                if self.lam_pt[e] == 0:
                    continue
                self.lam_pt[e] = self.zero
                leaf = int(self.leaf_of[e])
                self.heaps[leaf].update(e, self.w[e])
                self.counters["heap_ops"] += 1
                leaves[leaf] = None
            else:
                c = ~e
                if self.lam[c] == 0:
                    continue
                self.lam[c] = self.zero
                cells[c] = None
        for leaf in leaves:
            self._leaf_changed(leaf, stop=cid)
        for c in cells:
            self._propagate(c, stop=cid)

    # -- introspection -----------------------------------------------------

    def ops(self) -> int:
        heap_steps = sum(h.ops for h in self.heaps.values())
        return int(sum(self.counters.values()) + heap_steps)

    def counter_dict(self) -> dict:
        out = dict(self.counters)
        out["heap_steps"] = sum(h.ops for h in self.heaps.values())
        out["overflow_points"] = int(len(self.overflow))
        return out

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr(self.lam_pt.tolist()).encode())
        h.update(repr(self.lam).encode())
        h.update(repr(self.min_cost).encode())
        h.update(repr(self.dirty).encode())
        h.update(repr(self.ov_cost.tolist()).encode())
        return h.hexdigest()

    def check_drained(self, cid: int) -> None:
        stack = list(self.children[cid])
        while stack:
            c = stack.pop()
            if self.lam[c] != 0:
                raise AssertionError(f"cell {c} below drained cell {cid} has nonzero lam")
            if self.is_leaf[c]:
                for q in self.pts.get(c, ()):
                    if self.lam_pt[q] != 0:
                        raise AssertionError(f"point {q} below drained cell {cid} has nonzero lam")
            else:
                stack.extend(self.children[c])

    def check(self, shadow=None, rel: float = 1e-9) -> list[str]:
        """Violations of the two invariants (and of dirty-list completeness)."""
        bad: list[str] = []

        def differ(a, b):
            if self.exact or a == b:
                return a != b
            return not math.isclose(a, b, rel_tol=rel, abs_tol=rel)

        if shadow is not None:
            for q in range(self.m):
                c = self.cost(q)
                if differ(c, shadow[q]):
                    bad.append(f"cost invariant: point {q} cost {c} != shadow {shadow[q]}")
        for cid in range(len(self.lam) - 1, -1, -1):
            if not self.nonempty[cid]:
                if self.min_cost[cid] != INF or self.lam[cid] != 0:
                    bad.append(f"empty cell {cid} has state")
                continue
            if self.is_leaf[cid]:
                qs = self.pts[cid]
                want = min(self.w[q] + self.lam_pt[q] for q in qs.tolist())
                if not self.heaps[cid].check():
                    bad.append(f"heap of leaf {cid} is disordered")
            else:
                want = min(self.min_cost[ch] + self.lam[ch] for ch in self.children[cid] if self.nonempty[ch])
            if differ(self.min_cost[cid], want):
                bad.append(f"minCost invariant: cell {cid} minCost {self.min_cost[cid]} != {want}")
        lists = [set(x) for x in self.dirty]
        for q in np.flatnonzero(self.lam_pt != 0).tolist():
            for a in self.path[int(self.leaf_of[q])]:
                if q not in lists[a]:
                    bad.append(f"point {q} missing from dirty list of cell {a}")
        for c, v in enumerate(self.lam):
            if v != 0:
                for a in self.path[c][:-1]:
                    if ~c not in lists[a]:
                        bad.append(f"cell {c} missing from dirty list of cell {a}")
        return bad

    def checkpoint(self) -> dict:
        per_level: dict[int, int] = {}
        for c, v in enumerate(self.lam):
            if v != 0:
                lvl = len(self.path[c]) - 1
                per_level[lvl] = per_level.get(lvl, 0) + 1
        root = self.min_cost[0] + self.lam[0]
        return {
            "iteration": self.iteration,
            "nonzero_lambda_per_level": {str(k): v for k, v in sorted(per_level.items())},
            "nonzero_point_lambda": int(np.count_nonzero(self.lam_pt != 0)),
            "root_min_cost": "inf" if root == INF else float(root),
            "dirty_sizes": {str(c): len(x) for c, x in enumerate(self.dirty) if x},
        }
