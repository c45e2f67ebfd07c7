"""Problem instances, validation, random generation and JSON serialization.

The separating line is the x-axis.  Coverage instances put the points on or
above it and the weighted disk centers on or below it; hitting instances carry
the weights on the points instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from sepcover.geom import disk_inside, halfplane_inside

PROFILES = ("uniform", "clustered", "adversarial-overlap")


class InstanceFormatError(ValueError):
    """Malformed instance document; the message names the offending field."""


def _pair(v) -> tuple[float, float]:
    return (float(v[0]), float(v[1]))


@dataclass(frozen=True)
class CoverageInstance:
    radius: float
    points: tuple[tuple[float, float], ...]
    centers: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "points", tuple(_pair(p) for p in self.points))
        object.__setattr__(self, "centers", tuple(_pair(c) for c in self.centers))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.centers) != len(self.weights):
            raise ValueError("one weight per disk")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.centers)

    def point_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float).reshape(-1, 2)

    def center_array(self) -> np.ndarray:
        return np.array(self.centers, dtype=float).reshape(-1, 2)

    def sorted_order(self) -> np.ndarray:
        """Point indices left to right; equal x keeps input order."""
        xs = self.point_array()[:, 0]
        return np.argsort(xs, kind="stable")

    def coverage_matrix(self, eps: float = 1e-9, exact: bool = False, order=None) -> np.ndarray:
        """Boolean (m, n) matrix: entry [s, i] is True iff disk s covers point i."""
        pts = self.point_array()
        if order is not None:
            pts = pts[order]
        cen = self.center_array()
        return disk_inside(
            pts[None, :, 0], pts[None, :, 1], cen[:, None, 0], cen[:, None, 1], self.radius, eps, exact
        ).reshape(self.m, self.n)

    def subset(self, point_ids: Iterable[int] | None = None, disk_ids: Iterable[int] | None = None):
        pids = range(self.n) if point_ids is None else list(point_ids)
        dids = range(self.m) if disk_ids is None else list(disk_ids)
        return CoverageInstance(
            self.radius,
            [self.points[i] for i in pids],
            [self.centers[j] for j in dids],
            [self.weights[j] for j in dids],
        )

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "points": [list(p) for p in self.points],
            "disks": [{"center": list(c), "weight": w} for c, w in zip(self.centers, self.weights)],
        }


@dataclass(frozen=True)
class HittingInstance:
    """Weighted points above the line, unweighted disks centered below it."""

    radius: float
    points: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]
    centers: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "points", tuple(_pair(p) for p in self.points))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "centers", tuple(_pair(c) for c in self.centers))
        if len(self.points) != len(self.weights):
            raise ValueError("one weight per point")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.centers)

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "points": [{"p": list(p), "weight": w} for p, w in zip(self.points, self.weights)],
            "disks": [list(c) for c in self.centers],
        }


@dataclass(frozen=True)
class HalfplaneInstance:
    """Points and weighted halfplanes, lower (y <= a*x + b) unless marked upper."""

    points: tuple[tuple[float, float], ...]
    halfplanes: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]
    sides: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(_pair(p) for p in self.points))
        object.__setattr__(self, "halfplanes", tuple(_pair(h) for h in self.halfplanes))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        sides = tuple(self.sides) or ("lower",) * len(self.halfplanes)
        if len(sides) != len(self.halfplanes) or any(s not in ("lower", "upper") for s in sides):
            raise ValueError("sides must list 'lower' or 'upper' for every halfplane")
        object.__setattr__(self, "sides", sides)

    @property
    def lower_only(self) -> bool:
        return all(s == "lower" for s in self.sides)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.halfplanes)

    def coverage_matrix(self, eps: float = 1e-9, exact: bool = False, order=None) -> np.ndarray:
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if order is not None:
            pts = pts[order]
        hp = np.array(self.halfplanes, dtype=float).reshape(-1, 2)
        up = np.array([s == "upper" for s in self.sides], dtype=bool)[:, None]
        # an upper halfplane y >= a*x + b is the lower one of the reflected data
        sign = np.where(up, -1.0, 1.0)
        return halfplane_inside(
            pts[None, :, 0], sign * pts[None, :, 1], sign * hp[:, None, 0], sign * hp[:, None, 1], eps, exact
        ).reshape(self.m, self.n)

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "halfplanes": [
                {"a": a, "b": b, "weight": w, "side": side}
                for (a, b), w, side in zip(self.halfplanes, self.weights, self.sides)
            ],
        }


# ---------------------------------------------------------------------------


def _num_out(v):
    v = float(v)
    if math.isinf(v):
        return "inf"
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _num_in(v):
    if v == "inf":
        return math.inf
    return float(v)


@dataclass
class Solution:
    feasible: bool
    total_weight: float | Fraction
    chosen: list[int]
    prefix_values: list
    solver: str = ""
    exact: bool = False
    stats: dict = field(default_factory=dict)

    @classmethod
    def infeasible(cls, prefix, solver="", exact=False, stats=None) -> "Solution":
        return cls(False, math.inf, [], list(prefix), solver, exact, stats or {})

    def to_dict(self) -> dict:
        doc = {
            "feasible": self.feasible,
            "delta": _num_out(self.total_weight),
            "chosen": [int(i) for i in self.chosen],
            "prefix": [_num_out(v) for v in self.prefix_values],
            "solver": self.solver,
            "stats": self.stats,
        }
        if self.exact and isinstance(self.total_weight, Fraction):
            doc["delta_exact"] = str(self.total_weight)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Solution":
        try:
            delta = doc["delta"]
            if "delta_exact" in doc:
                delta = Fraction(doc["delta_exact"])
            else:
                delta = _num_in(delta)
            return cls(
                feasible=bool(doc["feasible"]),
                total_weight=delta,
                chosen=[int(i) for i in doc.get("chosen", [])],
                prefix_values=[_num_in(v) for v in doc.get("prefix", [])],
                solver=doc.get("solver", ""),
                exact="delta_exact" in doc,
                stats=doc.get("stats", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"bad solution document: {exc}") from exc


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Issue:
    kind: str
    message: str
    index: int | None = None


@dataclass
class ValidationReport:
    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return bool(self.errors or self.warnings)

    def kinds(self) -> set[str]:
        return {i.kind for i in self.errors + self.warnings}

    def lines(self) -> list[str]:
        return [f"error: {i.message}" for i in self.errors] + [f"warning: {i.message}" for i in self.warnings]


def _check_separation(rep, radius, points, centers, weights, weights_on):
    if not (math.isfinite(radius) and radius > 0):
        rep.errors.append(Issue("radius", f"radius must be positive and finite, got {radius}"))
    for i, (x, y) in enumerate(points):
        if not (math.isfinite(x) and math.isfinite(y)):
            rep.errors.append(Issue("non-finite", f"point {i} has a non-finite coordinate", i))
        elif y < 0:
            rep.errors.append(Issue("point-below-line", f"point {i} lies below the line (y={y})", i))
    for j, (x, y) in enumerate(centers):
        if not (math.isfinite(x) and math.isfinite(y)):
            rep.errors.append(Issue("non-finite", f"disk {j} has a non-finite center", j))
        elif y > 0:
            rep.errors.append(Issue("center-above-line", f"disk {j} center lies above the line (y={y})", j))
    for j, w in enumerate(weights):
        if not (math.isfinite(w) and w > 0):
            rep.errors.append(Issue("weight", f"{weights_on} {j} has non-positive weight {w}", j))


def _check_points(rep, points):
    seen: dict[float, int] = {}
    exact_seen: dict[tuple[float, float], int] = {}
    for i, p in enumerate(points):
        if p in exact_seen:
            rep.errors.append(Issue("duplicate-point", f"point {i} duplicates point {exact_seen[p]}", i))
            continue
        exact_seen[p] = i
        if p[0] in seen:
            rep.warnings.append(Issue("x-tie", f"x-tie: points {seen[p[0]]} and {i} share x={p[0]}", i))
        else:
            seen[p[0]] = i


def _check_coverage(rep, cov: np.ndarray, exact_boundary: np.ndarray | None, what="point"):
    if cov.size == 0 or cov.shape[0] == 0:
        uncovered = range(cov.shape[1])
    else:
        uncovered = np.flatnonzero(~cov.any(axis=0))
    for i in uncovered:
        rep.warnings.append(Issue("uncovered", f"{what} {i} is not covered by any disk", int(i)))
    if exact_boundary is not None:
        for s, i in zip(*np.nonzero(exact_boundary)):
            rep.warnings.append(Issue("on-boundary", f"point {i} lies on the boundary of disk {s}", int(i)))


def _boundary_pairs(pts: np.ndarray, cen: np.ndarray, radius: float) -> np.ndarray:
    """(m, n) mask of point/disk pairs whose squared-distance excess is exactly zero."""
    from sepcover.geom import _exact_disk_value

    dx = pts[None, :, 0] - cen[:, None, 0]
    dy = pts[None, :, 1] - cen[:, None, 1]
    val = dx * dx + dy * dy - radius * radius
    near = np.abs(val) <= 1e-9 * (1.0 + radius * radius)
    out = np.zeros(val.shape, dtype=bool)
    for s, i in zip(*np.nonzero(near)):
        out[s, i] = _exact_disk_value(pts[i, 0], pts[i, 1], cen[s, 0], cen[s, 1], radius) == 0
    return out


def validate(inst: CoverageInstance, exact: bool = False) -> ValidationReport:
    """Report every violated invariant.

    Errors (separation, weights, radius, duplicate points) make the instance
    unusable.  Warnings (x-ties, uncovered points, and in exact mode points on
    a disk boundary) are tolerated by the solvers.
    """
    rep = ValidationReport()
    _check_separation(rep, inst.radius, inst.points, inst.centers, inst.weights, "disk")
    _check_points(rep, inst.points)
    if rep.errors:
        return rep
    cov = inst.coverage_matrix(exact=exact)
    boundary = _boundary_pairs(inst.point_array(), inst.center_array(), inst.radius) if exact else None
    _check_coverage(rep, cov, boundary)
    return rep


def validate_hitting(hit: HittingInstance, exact: bool = False) -> ValidationReport:
    rep = ValidationReport()
    _check_separation(rep, hit.radius, hit.points, hit.centers, hit.weights, "point")
    _check_points(rep, hit.points)
    if rep.errors:
        return rep
    pts = np.array(hit.points, dtype=float).reshape(-1, 2)
    cen = np.array(hit.centers, dtype=float).reshape(-1, 2)
    cov = disk_inside(pts[None, :, 0], pts[None, :, 1], cen[:, None, 0], cen[:, None, 1], hit.radius, exact=exact)
    cov = cov.reshape(hit.m, hit.n)
    for s in np.flatnonzero(~cov.any(axis=1)) if hit.n else range(hit.m):
        rep.warnings.append(Issue("unhit", f"disk {s} contains no point", int(s)))
    return rep


# ---------------------------------------------------------------------------
# Generation


def _cap_point(rng, cx, cy, radius):
    """A point on or above the line inside the disk centered at (cx, cy)."""
    top = 0.9 * (radius + cy)
    y = rng.uniform(0.0, top)
    half = math.sqrt(max(radius * radius - (y - cy) ** 2, 0.0))
    return cx + 0.9 * half * rng.uniform(-1.0, 1.0), y


def generate(
    n: int,
    m: int,
    seed: int,
    profile: str = "uniform",
    radius: float = 1.0,
    infeasible: bool = False,
) -> CoverageInstance:
    """Random instance, a pure function of its arguments.

    Every point is covered by at least one disk unless ``infeasible`` is set,
    in which case exactly one point is planted out of reach of all disks.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if infeasible and n < 1:
        raise ValueError("an infeasible instance needs a point to strand")
    rng = np.random.default_rng([seed, n, m, PROFILES.index(profile)])
    r = radius
    if profile == "adversarial-overlap":
        width = r
    else:
        width = r * max(2.0, m / 8.0)

    if profile == "clustered":
        k = max(1, int(round(math.sqrt(m) / 2)))
        hubs = rng.uniform(0.0, width, size=k)
        cx = hubs[rng.integers(0, k, size=m)] + rng.normal(0.0, 0.6 * r, size=m)
        px = hubs[rng.integers(0, k, size=n)] + rng.normal(0.0, 0.6 * r, size=n)
    else:
        cx = rng.uniform(0.0, width, size=m)
        px = rng.uniform(0.0, width, size=n)
    cy = -rng.uniform(0.0, 0.9 * r, size=m)
    py = rng.uniform(0.0, 0.9 * r, size=n)
    weights = rng.uniform(1.0, 100.0, size=m)

    centers = np.column_stack([cx, cy])
    points = np.column_stack([px, py])

    def covered(i):
        return bool(np.any((centers[:, 0] - points[i, 0]) ** 2 + (centers[:, 1] - points[i, 1]) ** 2 <= r * r))

    for i in range(n):
        tries = 0
        while not covered(i):
            if tries < 20:
                lo, hi = (px.min(), px.max()) if profile == "clustered" else (0.0, width)
                points[i] = (rng.uniform(lo, hi), rng.uniform(0.0, 0.9 * r))
            else:
                j = int(rng.integers(0, m))
                points[i] = _cap_point(rng, centers[j, 0], centers[j, 1], r)
            tries += 1

    if infeasible:
        far = centers[:, 0].max() + 2.5 * r
        points[n - 1] = (far, rng.uniform(0.0, 0.9 * r))

    return CoverageInstance(r, points.tolist(), centers.tolist(), weights.tolist())


def generate_hitting(n: int, m: int, seed: int, radius: float = 1.0) -> HittingInstance:
    """Random hitting instance where every disk contains at least one point."""
    base = generate(m, n, seed, "uniform", radius)
    # The dual of a coverage instance, mirrored so that points sit above the line.
    return coverage_to_hitting(base)


def generate_halfplanes(n: int, m: int, seed: int) -> HalfplaneInstance:
    """Random lower-halfplane instance in which every point is covered."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    rng = np.random.default_rng([seed, n, m, 99])
    pts = rng.uniform(0.0, 10.0, size=(n, 2))
    slopes = rng.uniform(-2.0, 2.0, size=m)
    # Intercepts chosen so each halfplane's boundary passes through the strip.
    anchor_x = rng.uniform(0.0, 10.0, size=m)
    anchor_y = rng.uniform(0.0, 10.0, size=m)
    icpt = anchor_y - slopes * anchor_x
    weights = rng.uniform(1.0, 100.0, size=m)
    for i in range(n):
        while not np.any(slopes * pts[i, 0] + icpt >= pts[i, 1]):
            pts[i] = rng.uniform(0.0, 10.0, size=2)
    return HalfplaneInstance(pts.tolist(), np.column_stack([slopes, icpt]).tolist(), weights.tolist())


def coverage_to_hitting(inst: CoverageInstance) -> HittingInstance:
    """Hitting instance on the dual: disk centers become weighted points (mirrored)."""
    return HittingInstance(
        inst.radius,
        [(x, -y) for x, y in inst.centers],
        inst.weights,
        [(x, -y) for x, y in inst.points],
    )


def hitting_to_coverage(hit: HittingInstance) -> CoverageInstance:
    """Coverage instance whose disks are the (mirrored) hitting points."""
    return CoverageInstance(
        hit.radius,
        [(x, -y) for x, y in hit.centers],
        [(x, -y) for x, y in hit.points],
        hit.weights,
    )


# ---------------------------------------------------------------------------
# JSON


def _need(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    if key not in doc:
        raise InstanceFormatError(f"{where}: missing field '{key}'")
    return doc[key]


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceFormatError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _xy(v, where: str) -> tuple[float, float]:
    if not isinstance(v, list) or len(v) != 2:
        raise InstanceFormatError(f"{where}: expected [x, y]")
    return (_number(v[0], f"{where}[0]"), _number(v[1], f"{where}[1]"))


def instance_from_dict(doc):
    """Build a coverage, hitting or halfplane instance from a parsed document."""
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level: expected an object")
    if isinstance(doc.get("instance"), dict):  # reproducer files wrap the instance
        doc = doc["instance"]
    if "halfplanes" in doc:
        pts = _need(doc, "points", "top level")
        hps = doc["halfplanes"]
        if not isinstance(pts, list) or not isinstance(hps, list):
            raise InstanceFormatError("points/halfplanes: expected arrays")
        points = [_xy(p, f"points[{i}]") for i, p in enumerate(pts)]
        lines, weights, sides = [], [], []
        for j, h in enumerate(hps):
            where = f"halfplanes[{j}]"
            lines.append((_number(_need(h, "a", where), f"{where}.a"), _number(_need(h, "b", where), f"{where}.b")))
            weights.append(_number(_need(h, "weight", where), f"{where}.weight"))
            side = h.get("side", "lower")
            if side not in ("lower", "upper"):
                raise InstanceFormatError(f"{where}.side: expected 'lower' or 'upper', got {side!r}")
            sides.append(side)
        return HalfplaneInstance(points, lines, weights, tuple(sides))

    radius = _number(_need(doc, "radius", "top level"), "radius")
    pts = _need(doc, "points", "top level")
    disks = _need(doc, "disks", "top level")
    if not isinstance(pts, list):
        raise InstanceFormatError("points: expected an array")
    if not isinstance(disks, list):
        raise InstanceFormatError("disks: expected an array")
    hitting = any(isinstance(p, dict) for p in pts)
    if hitting:
        points, weights = [], []
        for i, p in enumerate(pts):
            where = f"points[{i}]"
            points.append(_xy(_need(p, "p", where), f"{where}.p"))
            weights.append(_number(_need(p, "weight", where), f"{where}.weight"))
        centers = [_xy(c, f"disks[{j}]") for j, c in enumerate(disks)]
        return HittingInstance(radius, points, weights, centers)
    points = [_xy(p, f"points[{i}]") for i, p in enumerate(pts)]
    centers, weights = [], []
    for j, d in enumerate(disks):
        where = f"disks[{j}]"
        centers.append(_xy(_need(d, "center", where), f"{where}.center"))
        weights.append(_number(_need(d, "weight", where), f"{where}.weight"))
    return CoverageInstance(radius, points, centers, weights)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def dumps(inst) -> str:
    return json.dumps(inst.to_dict(), separators=(",", ":"))


def read(path: str | Path | IO[str]):
    if hasattr(path, "read"):
        return loads(path.read())
    return loads(Path(path).read_text())


def write(inst, path: str | Path | IO[str]) -> None:
    text = dumps(inst) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text)
