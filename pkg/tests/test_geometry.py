import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deskorg.errors import DegenerateInput
from deskorg.geometry import (
    Point2,
    Polygon,
    Pose2,
    Segment,
    approx_polygon,
    axis_angle_diff,
    convex_hull,
    foot_of_perpendicular,
    intersection_area,
    min_area_rect,
    nearest_edge,
    normalize_angle,
    point_in_polygon,
    points_in_polygon,
    point_segment_distance,
    polygons_clearance,
    rect_polygon,
)

from oracles import (
    bbox_area_sweep,
    hull_edges_bruteforce,
    nearest_edge_exhaustive,
    random_convex_polygon,
)

UNIT_SQUARE = Polygon(((0, 0), (1, 0), (1, 1), (0, 1)))


def hull_edge_set(poly):
    v = poly.vertices
    return {(tuple(v[i]), tuple(v[(i + 1) % len(v)])) for i in range(len(v))}


class TestConvexHull:
    def test_interior_point_excluded(self):
        hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
        assert set(hull.vertices) == {(0, 0), (1, 0), (1, 1), (0, 1)}

    def test_triangle_is_its_own_hull(self):
        pts = [(0, 0), (2, 0.5), (0.3, 1.7)]
        assert set(convex_hull(pts).vertices) == set(pts)

    @pytest.mark.parametrize("pts", [[(0, 0), (1, 1)], [(0, 0), (1, 1), (2, 2), (3, 3)]])
    def test_degenerate(self, pts):
        with pytest.raises(DegenerateInput):
            convex_hull(pts)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        pts = [tuple(p) for p in rng.uniform(-1, 1, (40, 2))]
        hull = convex_hull(pts)
        assert hull_edge_set(hull) == hull_edges_bruteforce(pts)
        assert hull.is_convex()
        for p in pts:
            assert point_in_polygon(p, hull)

    def test_collinear_boundary_points_dropped(self):
        hull = convex_hull([(0, 0), (0.5, 0), (1, 0), (1, 1), (0, 1)])
        assert len(hull) == 4


class TestMinAreaRect:
    def test_axis_aligned_ruler(self):
        r = min_area_rect(rect_polygon(0.3, 0.04))
        assert r.angle == pytest.approx(0.0, abs=1e-12)
        assert r.half_extents == pytest.approx((0.15, 0.02), abs=1e-12)
        assert r.center == pytest.approx((0, 0), abs=1e-12)

    def test_rotated_square(self):
        sq = Polygon(tuple(Point2(x - 0.5, y - 0.5).rotated(math.pi / 4) for x, y in UNIT_SQUARE.vertices))
        r = min_area_rect(sq)
        assert r.area == pytest.approx(1.0, rel=1e-12)
        assert axis_angle_diff(2 * r.angle, 2 * math.pi / 4) == pytest.approx(0, abs=1e-9)

    @pytest.mark.parametrize("seed", range(20))
    def test_no_worse_than_angle_sweep(self, seed):
        rng = np.random.default_rng(100 + seed)
        poly = Polygon(tuple(random_convex_polygon(rng, n=int(rng.integers(3, 12)))))
        r = min_area_rect(poly)
        assert r.area <= bbox_area_sweep(poly.vertices) * (1 + 1e-9)
        rect = r.polygon()
        for v in poly.vertices:
            assert point_in_polygon(v, rect)

    def test_corner_round_trip(self):
        r = min_area_rect(Polygon(((0, 0), (3, 1), (2.5, 2.5), (-0.5, 1.5))))
        again = min_area_rect(r.polygon())
        assert again.center == pytest.approx(r.center, abs=1e-12)
        assert again.half_extents == pytest.approx(r.half_extents, abs=1e-12)
        assert axis_angle_diff(again.angle, r.angle) < 1e-12


class TestApproxPolygon:
    def test_triangle_unchanged(self):
        tri = Polygon(((0, 0), (0.1, 0), (0, 0.05)))
        assert approx_polygon(tri, 0.001).vertices == tri.vertices

    def test_square_midpoints_removed(self):
        sq = Polygon(((0, 0), (0.5, 0), (1, 0), (1, 0.5), (1, 1), (0.5, 1), (0, 1), (0, 0.5)))
        out = approx_polygon(sq, 0.001)
        assert set(out.vertices) == {(0, 0), (1, 0), (1, 1), (0, 1)}

    @pytest.mark.parametrize("seed", range(10))
    def test_jittered_rectangle(self, seed):
        rng = np.random.default_rng(seed)
        eps = 0.002
        corners = [(0, 0), (0.2, 0), (0.2, 0.03), (0, 0.03)]
        ring = []
        for i in range(4):
            a, b = np.array(corners[i]), np.array(corners[(i + 1) % 4])
            # edge samples >= 20 mm apart; denser sampling of thin shapes can keep a
            # near-corner neighbour as an extra vertex
            for t in np.linspace(0, 1, 8 if i % 2 == 0 else 1, endpoint=False):
                ring.append(a + t * (b - a))
        # jitter kept inside a disc of radius < eps / 2
        ang = rng.uniform(0, 2 * math.pi, len(ring))
        rad = rng.uniform(0, 0.45 * eps, len(ring))
        pts = [tuple(p + r * np.array([math.cos(a), math.sin(a)])) for p, r, a in zip(ring, rad, ang)]
        out = approx_polygon(Polygon(tuple(pts)), eps)
        assert len(out) == 4
        for c in corners:
            assert min(math.dist(c, v) for v in out.vertices) < eps
        for p in pts:
            n = len(out)
            assert min(point_segment_distance(p, out.vertices[i], out.vertices[(i + 1) % n]) for i in range(n)) <= eps

    def test_degenerate(self):
        sliver = Polygon(((0, 0), (1, 0), (0.5, 1e-5)))
        with pytest.raises(DegenerateInput):
            approx_polygon(sliver, 0.001)


def test_point_in_polygon_cases():
    assert point_in_polygon((0.5, 0.5), UNIT_SQUARE)
    assert not point_in_polygon((2.0, 0.5), UNIT_SQUARE)
    assert point_in_polygon((1.0, 0.3), UNIT_SQUARE)
    assert point_in_polygon((0.0, 0.0), UNIT_SQUARE)


L_SHAPE = Polygon(((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_points_in_polygon_matches_scalar(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-0.5, 2.5, size=(200, 2))
    # include vertices and edge midpoints, which count as inside
    v = np.asarray(L_SHAPE.vertices, float)
    pts = np.vstack([pts, v, (v + np.roll(v, -1, axis=0)) / 2])
    got = points_in_polygon(pts, L_SHAPE)
    want = [point_in_polygon(tuple(p), L_SHAPE) for p in pts]
    assert got.tolist() == want
    assert got[-12:].all()


class TestFoot:
    def test_interior(self):
        assert foot_of_perpendicular((1, 1), Segment((0, 0), (2, 0))) == (1, 0)

    def test_clamped(self):
        assert foot_of_perpendicular((3, 1), Segment((0, 0), (2, 0))) == (2, 0)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * math.pi))
    def test_perpendicular_when_unclamped(self, px, py, ang):
        seg = Segment((0.1, -0.2), Point2(0.1, -0.2) + Point2(3 * math.cos(ang), 3 * math.sin(ang)))
        p = Point2(px, py)
        t = (p - seg.p0).dot(seg.p1 - seg.p0) / seg.length ** 2
        foot = foot_of_perpendicular(p, seg)
        if 0 < t < 1:
            assert abs((p - foot).dot(seg.p1 - seg.p0)) < 1e-12 * max(1.0, p.norm() * 3)


class TestNearestEdge:
    def test_bottom_edge(self):
        seg, d = nearest_edge(UNIT_SQUARE, (0.5, 0.1))
        assert (seg.p0, seg.p1) == ((0, 0), (1, 0))
        assert d == pytest.approx(0.1)

    def test_tie_lowest_index(self):
        seg, d = nearest_edge(UNIT_SQUARE, (0.5, 0.5))
        assert (seg.p0, seg.p1) == ((0, 0), (1, 0))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_exhaustive(self, seed):
        rng = np.random.default_rng(seed)
        verts = random_convex_polygon(rng, n=7)
        poly = Polygon(tuple(verts))
        p = tuple(rng.uniform(-2, 2, 2))
        seg, d = nearest_edge(poly, p)
        idx, dref = nearest_edge_exhaustive(verts, p)
        assert seg.p0 == verts[idx]
        assert d == pytest.approx(dref, abs=1e-15)


@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_normalize_angle_idempotent(theta):
    a = normalize_angle(theta)
    assert -math.pi <= a < math.pi
    assert normalize_angle(a) == a
    assert Pose2((0, 0), theta).theta == a


def test_deterministic_bitwise():
    rng = np.random.default_rng(7)
    pts = [tuple(p) for p in rng.uniform(-1, 1, (50, 2))]
    assert convex_hull(pts) == convex_hull(list(reversed(pts)))
    assert min_area_rect(convex_hull(pts)) == min_area_rect(convex_hull(pts))


def test_intersection_and_clearance():
    a = rect_polygon(1, 1)
    b = a.translated((0.5, 0))
    assert intersection_area(a, b) == pytest.approx(0.5)
    c = a.translated((1.25, 0))
    assert intersection_area(a, c) == 0.0
    assert polygons_clearance(a, c) == pytest.approx(0.25)
    assert polygons_clearance(a, b) == 0.0


def test_approx_idempotent_random():
    rng = np.random.default_rng(3)
    for _ in range(30):
        verts = random_convex_polygon(rng, n=30, radius=0.1)
        poly = Polygon(tuple(verts))
        once = approx_polygon(poly, 0.004)
        assert approx_polygon(once, 0.004).vertices == once.vertices
