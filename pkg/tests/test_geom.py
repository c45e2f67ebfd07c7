import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sepcover.geom import (
    ArcFamily,
    Disk,
    GeometryError,
    HalfplaneLower,
    LineFamily,
    LowerArc,
    Point,
    arc_intersections,
    arc_y_at,
    disk_contains,
    from_fixed,
    halfplane_contains,
    to_fixed,
)


def arc(cx, cy, r=1.0, owner=0):
    return LowerArc.of_circle(owner, Point(cx, cy), r)


class TestDiskContains:
    def test_boundary_point_is_covered(self):
        assert disk_contains(Disk(Point(0, -1), 1), Point(0, 0))

    def test_point_just_outside(self):
        assert not disk_contains(Disk(Point(0, -1), 1), Point(0, 0.001))

    def test_distance_exactly_one(self):
        assert disk_contains(Disk(Point(0.3, -0.4), 1), Point(0.3, 0.6))

    def test_exact_mode_boundary(self):
        # the doubles nearest 0.6 and 0.4 sum to exactly 1
        assert Fraction(0.6) + Fraction(0.4) == 1
        assert disk_contains(Disk(Point(0.3, -0.4), 1), Point(0.3, 0.6), exact=True)

    def test_exact_mode_rejects_slightly_outside(self):
        assert not disk_contains(Disk(Point(0, -1), 1), Point(0, 1e-12), exact=True)
        assert disk_contains(Disk(Point(0, -1), 1), Point(0, 1e-12))

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            Disk(Point(0, 0), 0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-5, 5), st.floats(0, 3), st.floats(-5, 5), st.floats(-3, 0),
        st.floats(-100, 100), st.floats(-100, 100),
    )
    def test_translation_symmetry(self, px, py, cx, cy, tx, ty):
        d = Disk(Point(cx, cy), 1.0)
        p = Point(px, py)
        val = (px - cx) ** 2 + (py - cy) ** 2 - 1
        if abs(val) < 1e-6:  # translation rounding can move boundary cases
            return
        assert disk_contains(d, p) == disk_contains(d.translate(tx, ty), Point(px + tx, py + ty))


class TestArcs:
    def test_lowest_point(self):
        assert arc_y_at(arc(0, 0.5), 0.0) == pytest.approx(-0.5)

    def test_endpoint_meets_line(self):
        a = arc(0, 0.5)
        assert arc_y_at(a, a.xr) == pytest.approx(0.0, abs=1e-9)
        assert arc_y_at(a, a.xl) == pytest.approx(0.0, abs=1e-9)

    def test_translation(self):
        assert arc_y_at(arc(1, 0.5), 1.0) == pytest.approx(-0.5)

    def test_outside_range_raises(self):
        with pytest.raises(GeometryError):
            arc_y_at(arc(0, 0.5), 2.0)

    def test_empty_arc(self):
        assert arc(0, 1.0) is None
        assert arc(0, 2.0) is None

    def test_two_overlapping_circles_meet_once_below(self):
        pts = arc_intersections(arc(-0.5, 0.5), arc(0.5, 0.5, owner=1))
        assert len(pts) == 1
        assert pts[0].x == pytest.approx(0.0, abs=1e-12)
        assert pts[0].y == pytest.approx(0.5 - math.sqrt(3) / 2)

    def test_disjoint(self):
        assert arc_intersections(arc(-5, 0.5), arc(5, 0.5, owner=1)) == []

    def test_tangent_on_line_counts_once(self):
        # circles centered on the line, 2r apart, touch at the shared arc endpoint
        pts = arc_intersections(arc(0, 0), arc(2, 0, owner=1))
        assert len(pts) == 1
        assert pts[0].x == pytest.approx(1.0)
        assert pts[0].y == pytest.approx(0.0)

    def test_tangent_above_line_is_not_on_arcs(self):
        assert arc_intersections(arc(0, 0.5), arc(2, 0.5, owner=1)) == []

    def test_identical_circles_rejected(self):
        with pytest.raises(GeometryError):
            arc_intersections(arc(0, 0.5), arc(0, 0.5, owner=1))

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-2, 2), st.floats(0, 0.99), st.floats(-2, 2), st.floats(0, 0.99))
    def test_intersections_lie_on_both_arcs(self, x1, y1, x2, y2):
        if (x1, y1) == (x2, y2):
            return
        a1, a2 = arc(x1, y1), arc(x2, y2, owner=1)
        for p in arc_intersections(a1, a2):
            for a in (a1, a2):
                assert math.hypot(p.x - a.center.x, p.y - a.center.y) == pytest.approx(1.0, abs=1e-9)
                assert a.xl - 1e-9 <= p.x <= a.xr + 1e-9
            assert p.y <= 1e-9

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-3, 3), st.floats(0, 0.99), st.floats(0.001, 0.999))
    def test_interior_points_on_circle_below_line(self, cx, cy, t):
        a = arc(cx, cy)
        x = a.xl + t * (a.xr - a.xl)
        y = arc_y_at(a, x)
        assert math.hypot(x - cx, y - cy) == pytest.approx(1.0, abs=1e-9)
        assert y < 0


class TestHalfplanes:
    def test_boundary(self):
        assert halfplane_contains(HalfplaneLower(0, 0), Point(3, 0))

    def test_above(self):
        assert not halfplane_contains(HalfplaneLower(1, 0), Point(1, 2))

    def test_below(self):
        assert halfplane_contains(HalfplaneLower(-1, 5), Point(0, 4))


class TestFamilies:
    def test_arc_family_matches_scalar_arcs(self):
        fam = ArcFamily([[0, 0.5], [1, 0.2], [3, 1.5]], 1.0)
        assert list(fam.nonempty) == [True, True, False]
        assert fam.y_at(np.array([0]), np.array([0.0]))[0] == pytest.approx(-0.5)
        x = fam.intersect_x(np.array([0]), np.array([1]))[0]
        pts = arc_intersections(fam.arc(0), fam.arc(1))
        assert sorted(v for v in x if not np.isnan(v)) == pytest.approx([p.x for p in pts])

    def test_center_below_line_rejected(self):
        with pytest.raises(GeometryError):
            ArcFamily([[0, -0.1]], 1.0)

    def test_line_family(self):
        fam = LineFamily([1.0, -1.0], [0.0, 2.0])
        assert fam.intersect_x(np.array([0]), np.array([1]))[0, 0] == pytest.approx(1.0)
        assert fam.contains_exact(0, 0.0, 1.0)
        assert not fam.contains_exact(0, 0.0, -1.0)


def test_fixed_point_round_trip():
    vals = [1.5, 0.1, 3.0, 1e-3]
    ints, shift = to_fixed(vals)
    assert [from_fixed(v, shift) for v in ints] == [Fraction(v) for v in vals]
    assert from_fixed(math.inf, shift) == math.inf
