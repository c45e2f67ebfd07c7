"""Geometric primitives, robust predicates and the two dual curve families.

Coordinates are doubles.  Every predicate has a fast float path and an exact
path; the exact path evaluates the same expression over the rationals (each
double is a dyadic rational, so nothing is lost) but only for the entries the
float filter cannot decide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_EPS = 1e-9

# Pseudo curve ids used for cell boundaries.
BELOW = -1  # y = -inf
AXIS = -2  # the separating line y = 0
ABOVE = -3  # y = +inf
SENTINEL_Y = {BELOW: -math.inf, AXIS: 0.0, ABOVE: math.inf}

# Relative size of the band in which a float evaluation is not trusted.
_FILTER = 1e-12


class GeometryError(ValueError):
    """Raised on out-of-domain geometric queries."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("radius must be positive")

    def translate(self, tx: float, ty: float) -> "Disk":
        return Disk(Point(self.center.x + tx, self.center.y + ty), self.radius)


@dataclass(frozen=True)
class LowerArc:
    """Part of a circle strictly below the x-axis; the circle's center is on or above it."""

    owner: int
    center: Point
    radius: float
    xl: float
    xr: float

    @classmethod
    def of_circle(cls, owner: int, center: Point, radius: float) -> "LowerArc | None":
        if center.y < 0:
            raise GeometryError("lower arcs need a center on or above the line")
        if center.y >= radius:
            return None
        half = math.sqrt(radius * radius - center.y * center.y)
        return cls(owner, center, radius, center.x - half, center.x + half)


@dataclass(frozen=True)
class HalfplaneLower:
    """The closed region y <= a*x + b."""

    a: float
    b: float


def _exact_disk_value(px, py, cx, cy, radius) -> Fraction:
    dx = Fraction(px) - Fraction(cx)
    dy = Fraction(py) - Fraction(cy)
    r = Fraction(radius)
    return dx * dx + dy * dy - r * r


def disk_values(px, py, cx, cy, radius):
    """Squared distance minus squared radius, broadcast over the inputs."""
    dx = np.subtract(px, cx)
    dy = np.subtract(py, cy)
    return dx * dx + dy * dy - radius * radius


def disk_inside(px, py, cx, cy, radius, eps=DEFAULT_EPS, exact=False):
    """Closed-disk membership, broadcast over the inputs.

    Float mode accepts a squared-distance excess up to ``eps``.  Exact mode
    ignores ``eps`` and decides the sign of the excess over the rationals.
    """
    px, py, cx, cy = (np.asarray(v, dtype=float) for v in (px, py, cx, cy))
    dx = px - cx
    dy = py - cy
    val = dx * dx + dy * dy - radius * radius
    if not exact:
        return val <= eps
    out = np.atleast_1d(val <= 0)
    guard = _FILTER * (dx * dx + dy * dy + radius * radius + np.abs(px) + np.abs(cx) + 1e-300)
    unsure = np.flatnonzero(np.abs(val) <= guard)
    if len(unsure):
        flat = out.reshape(-1)
        fx, fy, fcx, fcy = (np.broadcast_to(v, val.shape).reshape(-1) for v in (px, py, cx, cy))
        for i in unsure:
            flat[i] = _exact_disk_value(fx[i], fy[i], fcx[i], fcy[i], radius) <= 0
    return out.reshape(val.shape)


def halfplane_inside(px, py, a, b, eps=DEFAULT_EPS, exact=False):
    """Closed lower-halfplane membership ``py <= a*px + b``, broadcast."""
    px, py, a, b = (np.asarray(v, dtype=float) for v in (px, py, a, b))
    val = a * px + b - py
    if not exact:
        return val >= -eps
    out = np.atleast_1d(val >= 0)
    guard = _FILTER * (np.abs(a * px) + np.abs(b) + np.abs(py) + 1e-300)
    unsure = np.flatnonzero(np.abs(val) <= guard)
    if len(unsure):
        flat = out.reshape(-1)
        fx, fy, fa, fb = (np.broadcast_to(v, val.shape).reshape(-1) for v in (px, py, a, b))
        for i in unsure:
            ex = Fraction(fa[i]) * Fraction(fx[i]) + Fraction(fb[i]) - Fraction(fy[i])
            flat[i] = ex >= 0
    return out.reshape(val.shape)


def disk_contains(d: Disk, p: Point, eps: float = DEFAULT_EPS, exact: bool = False) -> bool:
    return bool(disk_inside(p.x, p.y, d.center.x, d.center.y, d.radius, eps, exact))


def halfplane_contains(h: HalfplaneLower, p: Point, eps: float = DEFAULT_EPS, exact: bool = False) -> bool:
    return bool(halfplane_inside(p.x, p.y, h.a, h.b, eps, exact))


def arc_y_at(arc: LowerArc, x: float) -> float:
    if not arc.xl <= x <= arc.xr:
        raise GeometryError(f"x={x} outside arc range [{arc.xl}, {arc.xr}]")
    t = arc.radius * arc.radius - (x - arc.center.x) ** 2
    return arc.center.y - math.sqrt(max(t, 0.0))


def arc_intersections(a1: LowerArc, a2: LowerArc, tol: float = 1e-12) -> list[Point]:
    """Common points of two lower arcs of equal radius, sorted by x.

    Arc endpoints on the x-axis count as part of the arc, so two circles
    centered on the axis 2r apart meet in their shared endpoint.
    """
    if not math.isclose(a1.radius, a2.radius, rel_tol=1e-12):
        raise GeometryError("arcs must come from circles of one radius")
    dx = a2.center.x - a1.center.x
    dy = a2.center.y - a1.center.y
    d = math.hypot(dx, dy)
    if d == 0:
        raise GeometryError("identical circles have no finite intersection set")
    r = a1.radius
    if d * d > 4 * r * r + tol * r * r:
        return []
    h = math.sqrt(max(r * r - d * d / 4, 0.0))
    mx = (a1.center.x + a2.center.x) / 2
    my = (a1.center.y + a2.center.y) / 2
    ux, uy = dx / d, dy / d
    un = math.hypot(ux, uy)  # differs from 1 when the offsets are subnormal
    ux, uy = ux / un, uy / un
    cands = [(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]
    if h <= tol * r:
        cands = [(mx, my)]
    out = []
    lim = tol * r
    for x, y in cands:
        if y > lim:
            continue
        if a1.xl - lim <= x <= a1.xr + lim and a2.xl - lim <= x <= a2.xr + lim:
            out.append(Point(x, min(y, 0.0)))
    out.sort(key=lambda p: p.x)
    return out


# ---------------------------------------------------------------------------
# Exact weights.  Every double is m * 2**e, so one common power of two turns a
# list of doubles into integers without rounding.


def to_fixed(values) -> tuple[list[int], int]:
    ratios = [float(v).as_integer_ratio() for v in values]
    shift = max((den.bit_length() - 1 for _, den in ratios), default=0)
    return [num << (shift - (den.bit_length() - 1)) for num, den in ratios], shift


def from_fixed(value, shift: int):
    if isinstance(value, float):
        return value  # only ever inf
    return Fraction(value, 1 << shift)


# ---------------------------------------------------------------------------
# Curve families over which the cutting is built.  Both describe a region per
# curve id ("inside" = on or above the curve) and are evaluated vectorised.


class ArcFamily:
    """Lower arcs of equal-radius circles centered on or above the x-axis."""

    kind = "arcs"
    root_top = AXIS

    def __init__(self, centers, radius: float):
        centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        self.cx = centers[:, 0].copy()
        self.cy = centers[:, 1].copy()
        if np.any(self.cy < 0):
            raise GeometryError("dual disk centers must lie on or above the line")
        self.radius = float(radius)
        self.size = len(self.cx)
        self.nonempty = self.cy < self.radius
        half = np.sqrt(np.maximum(self.radius**2 - self.cy**2, 0.0))
        self.xl = np.where(self.nonempty, self.cx - half, np.nan)
        self.xr = np.where(self.nonempty, self.cx + half, np.nan)
        self.scale = self.radius

    def arc(self, i: int) -> LowerArc | None:
        return LowerArc.of_circle(i, Point(self.cx[i], self.cy[i]), self.radius)

    def _eval(self, ids, x):
        t = self.radius**2 - (x - self.cx[ids]) ** 2
        return self.cy[ids] - np.sqrt(np.maximum(t, 0.0))

    def y_at(self, ids, x):
        ids = np.asarray(ids)
        x = np.asarray(x, float)
        if ids.shape != x.shape:
            ids, x = np.broadcast_arrays(ids, x)
        if ids.size and ids.min() >= 0:
            return self._eval(ids, x)
        out = np.empty(ids.shape)
        real = ids >= 0
        out[ids == BELOW] = -np.inf
        out[ids == AXIS] = 0.0
        out[ids == ABOVE] = np.inf
        if real.any():
            out[real] = self._eval(ids[real], x[real])
        return out

    def y_scalar(self, i: int, x: float) -> float:
        if i < 0:
            return SENTINEL_Y[i]
        t = self.radius**2 - (x - self.cx[i]) ** 2
        return float(self.cy[i]) - math.sqrt(max(t, 0.0))

    def intersect_x(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != b.shape:
            a, b = np.broadcast_arrays(a, b)
        if a.size and min(a.min(), b.min()) >= 0:
            return self._intersect_real(a, b)
        out = np.full(a.shape + (2,), np.nan)
        real = (a >= 0) & (b >= 0)
        if real.any():
            out[real] = self._intersect_real(a[real], b[real])
        return out

    def _intersect_real(self, ia, ib):
        dx = self.cx[ib] - self.cx[ia]
        dy = self.cy[ib] - self.cy[ia]
        d2 = dx * dx + dy * dy
        r2 = self.radius**2
        ok = (d2 > 0) & (d2 <= 4 * r2)
        d = np.sqrt(np.where(ok, d2, 1.0))
        h = np.sqrt(np.maximum(r2 - d2 / 4, 0.0))
        mx = (self.cx[ia] + self.cx[ib]) / 2
        my = (self.cy[ia] + self.cy[ib]) / 2
        x1 = mx - h * dy / d
        y1 = my + h * dx / d
        x2 = mx + h * dy / d
        y2 = my - h * dx / d
        res = np.empty(ia.shape + (2,))
        res[..., 0] = np.where(ok & (y1 < 0), x1, np.nan)
        res[..., 1] = np.where(ok & (y2 < 0), x2, np.nan)
        return res

    def value(self, ids, x, y):
        """<= 0 inside the closed disk of curve ``ids``."""
        return disk_values(x, y, self.cx[ids], self.cy[ids], self.radius)

    def contains_exact(self, i: int, x: float, y: float) -> bool:
        return bool(disk_inside(x, y, self.cx[i], self.cy[i], self.radius, exact=True))


class LineFamily:
    """Non-vertical lines y = slope*x + intercept; the region is on or above the line."""

    kind = "lines"
    root_top = ABOVE

    def __init__(self, slopes, intercepts):
        self.slope = np.asarray(slopes, dtype=float).copy()
        self.intercept = np.asarray(intercepts, dtype=float).copy()
        self.size = len(self.slope)
        self.nonempty = np.ones(self.size, dtype=bool)
        self.xl = np.full(self.size, -np.inf)
        self.xr = np.full(self.size, np.inf)
        self.scale = 1.0 + float(np.max(np.abs(self.intercept), initial=0.0))

    def _eval(self, ids, x):
        return self.slope[ids] * x + self.intercept[ids]

    def y_at(self, ids, x):
        ids = np.asarray(ids)
        x = np.asarray(x, float)
        if ids.shape != x.shape:
            ids, x = np.broadcast_arrays(ids, x)
        if ids.size and ids.min() >= 0:
            return self._eval(ids, x)
        out = np.empty(ids.shape)
        real = ids >= 0
        out[ids == BELOW] = -np.inf
        out[ids == AXIS] = 0.0
        out[ids == ABOVE] = np.inf
        if real.any():
            out[real] = self._eval(ids[real], x[real])
        return out

    def y_scalar(self, i: int, x: float) -> float:
        if i < 0:
            return SENTINEL_Y[i]
        return float(self.slope[i] * x + self.intercept[i])

    def intersect_x(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        out = np.full(a.shape + (2,), np.nan)
        real = (a >= 0) & (b >= 0)
        if not real.any():
            return out
        ia, ib = a[real], b[real]
        ds = self.slope[ia] - self.slope[ib]
        ok = ds != 0
        x = (self.intercept[ib] - self.intercept[ia]) / np.where(ok, ds, 1.0)
        res = np.full(ia.shape + (2,), np.nan)
        res[:, 0] = np.where(ok, x, np.nan)
        out[real] = res
        return out

    def value(self, ids, x, y):
        return self.slope[ids] * x + self.intercept[ids] - y

    def contains_exact(self, i: int, x: float, y: float) -> bool:
        val = Fraction(self.slope[i]) * Fraction(x) + Fraction(self.intercept[i]) - Fraction(y)
        return val <= 0
