"""Hierarchical cutting of a family of x-monotone curves.

Cells are pseudo-trapezoids: two vertical walls and a curve (or the axis, or
nothing) as top and bottom.  Level i cells are crossed by at most n / rho**i
curves and the leaves by at most n / r.  Each cell is refined by taking a
random sample of its conflict curves, building the vertical decomposition of
the sample inside the cell and splitting again any piece that is still
crossed too often, so the bounds always hold on return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sepcover.geom import ABOVE, AXIS, BELOW, GeometryError

INSIDE, OUTSIDE, CROSSED = "inside", "outside", "crossed"


@dataclass(eq=False)
class Cell:
    id: int
    level: int
    parent: int | None
    xl: float
    xr: float
    bottom: int  # curve id, or BELOW
    top: int  # curve id, AXIS or ABOVE
    rep: tuple[float, float]
    conflicts: np.ndarray
    children: list[int] = field(default_factory=list)
    path: tuple[int, ...] = ()  # ancestors from the root down to this cell


ROOT_TRIES = 3  # sampled decompositions compared at the root split


def levels_for(r: int, rho: int) -> int:
    """Smallest k with rho**k >= r."""
    k, p = 0, 1
    while p < r:
        p *= rho
        k += 1
    return k


def _midpoints(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    with np.errstate(invalid="ignore"):
        out = (a + b) / 2
        bad = ~np.isfinite(out)
        if not bad.any():
            return out
        # an infinite end: step one unit (plus the finite end's size) inside
        a2, b2 = np.broadcast_arrays(a, b)
        out = np.array(out, dtype=float, copy=True).reshape(bad.shape)
        ai, bi = a2[bad], b2[bad]
        fix = np.where(np.isneginf(ai) & np.isfinite(bi), bi - 1.0 - np.abs(bi), out[bad])
        fix = np.where(np.isfinite(ai) & np.isposinf(bi), ai + 1.0 + np.abs(ai), fix)
        fix = np.where(np.isneginf(ai) & np.isposinf(bi), 0.0, fix)
        out[bad] = fix
        return out


class HierCutting:
    def __init__(self, family, r: int, rho: int, cells: list[Cell], k: int):
        self.family = family
        self.r = r
        self.rho = rho
        self.k = k
        self.cells = cells
        self.leaves = [c.id for c in cells if c.level == k]
        n = family.size
        self.disk_cells: list[list[int]] = [[] for _ in range(n)]
        for c in cells:
            for d in c.conflicts.tolist():
                self.disk_cells[d].append(c.id)
        self._child_cache: dict[int, tuple] = {}
        # children of a cell are built consecutively, so they form an id range
        self.first_child = np.array([c.children[0] if c.children else -1 for c in cells], dtype=np.int64)
        self.n_children = np.array([len(c.children) for c in cells], dtype=np.int64)
        self.rep_x = np.array([c.rep[0] for c in cells])
        self.rep_y = np.array([c.rep[1] for c in cells])
        for c in cells:
            if c.children:
                assert c.children == list(range(c.children[0], c.children[0] + len(c.children)))
        self._crossed_mark = np.zeros(len(cells), dtype=bool)
        tol = family.scale
        self.edge_tol = 1e-10 * tol
        self.axis_tol = 1e-7 * tol

    # -- queries -----------------------------------------------------------

    @property
    def root(self) -> Cell:
        return self.cells[0]

    def is_leaf(self, cid: int) -> bool:
        return self.cells[cid].level == self.k

    def contains(self, cid: int, xs, ys, tol: float = 0.0):
        """Closed-cell membership (widened by ``tol``), vectorised over points."""
        c = self.cells[cid]
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        fam = self.family
        inx = (xs >= c.xl - tol) & (xs <= c.xr + tol)
        yb = fam.y_at(np.full(xs.shape, c.bottom), xs)
        yt = fam.y_at(np.full(xs.shape, c.top), xs)
        return inx & (ys >= yb - tol) & (ys <= yt + tol)

    def _children_arrays(self, cid: int):
        got = self._child_cache.get(cid)
        if got is None:
            ch = self.cells[cid].children
            cells = [self.cells[j] for j in ch]
            got = (
                np.array(ch, dtype=np.int64),
                np.array([c.xl for c in cells]),
                np.array([c.xr for c in cells]),
                np.array([c.bottom for c in cells], dtype=np.int64),
                np.array([c.top for c in cells], dtype=np.int64),
                np.array([c.rep[0] for c in cells]),
                np.array([c.rep[1] for c in cells]),
            )
            self._child_cache[cid] = got
        return got

    def _member_matrix(self, cid: int, xs, ys, tol: float):
        _, cxl, cxr, cb, ct, _, _ = self._children_arrays(cid)
        X = xs[:, None]
        Y = ys[:, None]
        fam = self.family
        inx = (X >= cxl[None, :] - tol) & (X <= cxr[None, :] + tol)
        yb = fam.y_at(np.broadcast_to(cb[None, :], inx.shape), np.broadcast_to(X, inx.shape))
        yt = fam.y_at(np.broadcast_to(ct[None, :], inx.shape), np.broadcast_to(X, inx.shape))
        return inx, inx & (Y >= yb - tol) & (Y <= yt + tol)

    def locate(self, x: float, y: float) -> int:
        """Leaf containing (x, y); on shared boundaries the lowest cell id wins."""
        if self.family.root_top == AXIS and y > 0:
            raise GeometryError(f"query point ({x}, {y}) lies above the line")
        leaf, _ = self.locate_many(np.array([x]), np.array([y]))
        return int(leaf[0])

    def locate_many(self, xs, ys):
        """Leaves of many points at once, plus a mask of boundary-hugging points.

        A point is flagged when it comes within a rounding-level distance of
        the axis, a wall, or the top or bottom curve of a cell on its path.
        Such points cannot be classified safely through a cell's
        representative point.
        """
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        m = len(xs)
        cur = np.zeros(m, dtype=np.int64)
        fragile = np.zeros(m, dtype=bool)
        if self.family.root_top == AXIS:
            fragile |= ys > -self.axis_tol
        tol = 1e-12 * self.family.scale
        for _level in range(self.k):
            order = np.argsort(cur, kind="stable")
            bounds = np.flatnonzero(np.diff(cur[order])) + 1
            for grp in np.split(order, bounds):
                if len(grp) == 0:
                    continue
                cid = int(cur[grp[0]])
                kids = self.cells[cid].children
                if len(kids) == 1:
                    cur[grp] = kids[0]
                    continue
                gx, gy = xs[grp], ys[grp]
                inx, inside = self._member_matrix(cid, gx, gy, tol)
                found = inside.any(axis=1)
                pick = np.where(found, inside.argmax(axis=1), inx.argmax(axis=1))
                fragile[grp[~found]] = True
                chosen = np.asarray(kids)[pick]
                cur[grp] = chosen
                fragile[grp] |= self._near_boundary(chosen, gx, gy)
        return cur, fragile

    def _near_boundary(self, cids, xs, ys):
        fam = self.family
        tol = self.edge_tol
        xl = np.array([self.cells[c].xl for c in cids])
        xr = np.array([self.cells[c].xr for c in cids])
        near = (np.abs(xs - xl) <= tol) | (np.abs(xr - xs) <= tol)
        for attr in ("bottom", "top"):
            ids = np.array([getattr(self.cells[c], attr) for c in cids], dtype=np.int64)
            real = ids >= 0
            if real.any():
                near[real] |= self._curve_distance(ids[real], xs[real], ys[real]) <= tol
        return near

    def _curve_distance(self, ids, xs, ys):
        fam = self.family
        if fam.kind == "arcs":
            dist = np.hypot(xs - fam.cx[ids], ys - fam.cy[ids])
            return np.abs(dist - fam.radius)
        return np.abs(fam.value(ids, xs, ys)) / np.hypot(1.0, fam.slope[ids])

    def classify_children(self, cid: int, d: int, crossed_cells=None) -> list[tuple[int, str]]:
        """Tag each child of ``cid`` as crossed by, inside or outside dual region ``d``."""
        if crossed_cells is None:
            crossed_cells = set(self.disk_cells[d])
        ch, _, _, _, _, rx, ry = self._children_arrays(cid)
        inside = self.family.value(d, rx, ry) <= 0
        return [
            (c, CROSSED if c in crossed_cells else (INSIDE if f else OUTSIDE))
            for c, f in zip(ch.tolist(), inside.tolist())
        ]

    def uncrossed_children(self, parents, d: int, crossed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Children of ``parents`` not crossed by region ``d``, classified in one pass.

        Returns (index into ``parents``, child id, inside flag) arrays.
        """
        parents = np.asarray(parents, dtype=np.int64)
        counts = self.n_children[parents]
        owner = np.repeat(np.arange(len(parents)), counts)
        offset = np.arange(len(owner)) - np.repeat(np.cumsum(counts) - counts, counts)
        kids = self.first_child[parents][owner] + offset
        mark = self._crossed_mark
        mark[crossed] = True
        keep = ~mark[kids]
        mark[crossed] = False
        owner, kids = owner[keep], kids[keep]
        inside = self.family.value(d, self.rep_x[kids], self.rep_y[kids]) <= 0
        return owner, kids, inside

    def stats(self) -> dict:
        leaves = [self.cells[c] for c in self.leaves]
        return {
            "levels": self.k + 1,
            "cells": len(self.cells),
            "leaves": len(leaves),
            "r": self.r,
            "rho": self.rho,
            "max_leaf_conflict": max((len(c.conflicts) for c in leaves), default=0),
            "sum_conflict": int(sum(len(c.conflicts) for c in self.cells)),
            "max_children": max((len(c.children) for c in self.cells), default=0),
            "c_cells": len(self.cells) / float(self.r * self.r),
        }


class _Refiner:
    def __init__(self, family, rng, sample_factor: float):
        self.family = family
        self.rng = rng
        self.sample_factor = sample_factor
        self.tol = 1e-12 * family.scale

    def refine(self, region, conflicts: np.ndarray, bound: float, boost: float = 1.0, tries: int = 1) -> list:
        """Split ``region`` into pieces each crossed by at most ``bound`` curves.

        The first split keeps the smallest of ``tries`` sampled decompositions.
        """
        n_conf = len(conflicts)
        if n_conf <= bound:
            return [(region, conflicts)]
        ratio = n_conf / max(bound, 1.0)
        size = math.ceil(boost * self.sample_factor * ratio * math.log(ratio + 1.0, 2))
        size = min(n_conf, max(2, size))
        # the smallest of a few sampled decompositions; steadies the cell count
        best = None
        for _ in range(tries):
            cand = np.sort(self.rng.choice(conflicts, size=size, replace=False))
            got = self.decompose(region, cand)
            if best is None or len(got) < len(best[1]):
                best = (cand, got)
        sample, traps = best
        rest = np.setdiff1d(conflicts, sample, assume_unique=True)
        hits = self.crossing(rest, traps)
        out = []
        for j, trap in enumerate(traps):
            sub = rest[hits[:, j]]
            if len(sub) <= bound:
                out.append((trap, sub))
            else:
                out.extend(self.refine(trap, sub, bound, boost * 2 if len(sub) >= n_conf else boost))
        return out

    def decompose(self, region, sample: np.ndarray) -> list[tuple]:
        """Vertical decomposition of ``sample`` clipped to ``region``, left to right."""
        fam = self.family
        xl, xr, bot, top = region
        sx0 = fam.xl[sample]
        sx1 = fam.xr[sample]
        events = [np.array([xl, xr]), sx0, sx1]
        s = len(sample)
        if s > 1:
            ii, jj = np.triu_indices(s, 1)
            X = fam.intersect_x(sample[ii], sample[jj])
            owners = np.repeat(sample[ii][:, None], 2, axis=1)
            ok = np.isfinite(X)
            X, owners = X[ok], owners[ok]
            if len(X):
                y = fam.y_at(owners, X)
                keep = (y >= fam.y_at(np.full(X.shape, bot), X) - self.tol) & (
                    y <= fam.y_at(np.full(X.shape, top), X) + self.tol
                )
                events.append(X[keep])
        for bnd in (bot, top):
            if bnd >= 0:
                events.append(fam.intersect_x(sample, np.full(s, bnd)).ravel())
        ev = np.concatenate(events)
        ev = ev[~np.isnan(ev)]
        ev = np.unique(ev[(ev >= xl) & (ev <= xr)])
        mids = _midpoints(ev[:-1], ev[1:])
        K = len(mids)
        Y = fam.y_at(np.broadcast_to(sample[None, :], (K, s)), np.broadcast_to(mids[:, None], (K, s)))
        defined = (sx0[None, :] < mids[:, None]) & (mids[:, None] < sx1[None, :])
        yb = fam.y_at(np.full(K, bot), mids)
        yt = fam.y_at(np.full(K, top), mids)
        active = defined & (Y > yb[:, None]) & (Y < yt[:, None])
        traps: list[list] = []
        open_: dict[tuple[int, int], int] = {}
        for j in range(K):
            cols = np.flatnonzero(active[j])
            chain = [bot] + sample[cols[np.argsort(Y[j, cols], kind="stable")]].tolist() + [top]
            nxt = {}
            for key in zip(chain[:-1], chain[1:]):
                idx = open_.get(key)
                if idx is None:
                    idx = len(traps)
                    traps.append([ev[j], ev[j + 1], key[0], key[1]])
                else:
                    traps[idx][1] = ev[j + 1]
                nxt[key] = idx
            open_ = nxt
        traps.sort(key=lambda t: (t[0], t[1]))
        return [tuple(t) for t in traps]

    def crossing(self, ids: np.ndarray, traps: list[tuple]) -> np.ndarray:
        """Boolean (len(ids), len(traps)): does curve ids[a] cross the open trapezoid?"""
        fam = self.family
        T = len(traps)
        out = np.zeros((len(ids), T), dtype=bool)
        if len(ids) == 0 or T == 0:
            return out
        txl = np.array([t[0] for t in traps])
        txr = np.array([t[1] for t in traps])
        tb = np.array([t[2] for t in traps], dtype=np.int64)
        tt = np.array([t[3] for t in traps], dtype=np.int64)
        lo = np.maximum(txl[None, :], fam.xl[ids][:, None])
        hi = np.minimum(txr[None, :], fam.xr[ids][:, None])
        ai, ti = np.nonzero(lo < hi)
        if len(ai) == 0:
            return out
        a = ids[ai]
        lo, hi = lo[ai, ti], hi[ai, ti]
        b, t = tb[ti], tt[ti]
        cand = np.empty((len(a), 6))
        cand[:, 0] = lo
        cand[:, 1] = hi
        cand[:, 2:4] = fam.intersect_x(a, b)
        cand[:, 4:6] = fam.intersect_x(a, t)
        inner = cand[:, 2:]
        with np.errstate(invalid="ignore"):
            inner[~((inner > lo[:, None]) & (inner < hi[:, None]))] = np.nan
        cand[:, 2:] = inner
        cand.sort(axis=1)
        left, right = cand[:, :-1], cand[:, 1:]
        with np.errstate(invalid="ignore"):
            ok = ~np.isnan(right) & (right > left)
        mids = np.where(ok, _midpoints(left, right), 0.0)
        shape = mids.shape
        ya = fam.y_at(np.broadcast_to(a[:, None], shape), mids)
        yb = fam.y_at(np.broadcast_to(b[:, None], shape), mids)
        yt = fam.y_at(np.broadcast_to(t[:, None], shape), mids)
        hit = ok & (ya > yb - self.tol) & (ya < yt + self.tol)
        out[ai, ti] = hit.any(axis=1)
        return out


def _rep_point(family, xl, xr, bot, top) -> tuple[float, float]:
    if math.isinf(xl) or math.isinf(xr):
        x = float(_midpoints(xl, xr))
    else:
        x = (xl + xr) / 2
    yb = family.y_scalar(bot, x)
    yt = family.y_scalar(top, x)
    if math.isinf(yb) and math.isinf(yt):
        y = 0.0
    elif math.isinf(yb):
        y = yt - family.scale
    elif math.isinf(yt):
        y = yb + family.scale
    else:
        y = (yb + yt) / 2
    return (x, y)


def build(family, r: int, rho: int = 4, seed: int = 0, sample_factor: float = 1.0) -> HierCutting:
    """Hierarchical (1/r)-cutting of ``family`` over its root region.

    The root is the closed lower halfplane for arc families and the whole
    plane for line families.  Construction is randomized but always returns a
    structure meeting the crossing bounds.
    """
    n = family.size
    if n < 1:
        raise ValueError("cannot cut an empty family")
    if not 1 <= r <= n:
        raise ValueError(f"r must lie in [1, {n}], got {r}")
    if rho < 2:
        raise ValueError("rho must be at least 2")
    rng = np.random.default_rng(seed)
    k = levels_for(r, rho)
    root_region = (-math.inf, math.inf, BELOW, family.root_top)
    root = Cell(
        0, 0, None, -math.inf, math.inf, BELOW, family.root_top,
        _rep_point(family, *root_region), np.flatnonzero(family.nonempty), path=(0,),
    )
    cells = [root]
    refiner = _Refiner(family, rng, sample_factor)
    frontier = [root]
    for level in range(1, k + 1):
        bound = n / r if level == k else n / rho**level
        nxt = []
        for cell in frontier:
            region = (cell.xl, cell.xr, cell.bottom, cell.top)
            for (xl, xr, b, t), confl in refiner.refine(region, cell.conflicts, bound, tries=ROOT_TRIES if level == 1 else 1):
                child = Cell(
                    len(cells), level, cell.id, xl, xr, b, t,
                    _rep_point(family, xl, xr, b, t), np.asarray(confl, dtype=np.int64),
                    path=cell.path + (len(cells),),
                )
                cell.children.append(child.id)
                cells.append(child)
                nxt.append(child)
        frontier = nxt
    return HierCutting(family, r, rho, cells, k)
