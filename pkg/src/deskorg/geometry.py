"""Planar geometry shared by perception, primitives and the simulator.

Coordinates are meters in the table frame, angles are CCW-positive radians.
All functions are pure; polygons are immutable and counterclockwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateInput

TOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def __mul__(self, k):  # type: ignore[override]
        return Point2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self):
        return Point2(-self.x, -self.y)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def cross(self, other) -> float:
        return self.x * other[1] - self.y * other[0]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Point2":
        n = self.norm()
        if n < TOL:
            raise DegenerateInput("cannot normalize a zero vector")
        return Point2(self.x / n, self.y / n)

    def perp(self) -> "Point2":
        """Rotate by +90 degrees."""
        return Point2(-self.y, self.x)

    def rotated(self, angle: float) -> "Point2":
        c, s = math.cos(angle), math.sin(angle)
        return Point2(c * self.x - s * self.y, s * self.x + c * self.y)


Vec2 = Point2


def heading(angle: float) -> Point2:
    return Point2(math.cos(angle), math.sin(angle))


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    if -math.pi <= theta < math.pi:
        return theta
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    wrapped -= math.pi
    if wrapped >= math.pi:
        wrapped -= 2.0 * math.pi
    return wrapped


def angle_mod_pi(theta: float) -> float:
    """Wrap an axis orientation into [0, pi)."""
    a = math.fmod(theta, math.pi)
    if a < 0.0:
        a += math.pi
    if a >= math.pi:
        a -= math.pi
    return a


def axis_angle_diff(a: float, b: float) -> float:
    """Smallest difference between two pi-periodic orientations."""
    d = angle_mod_pi(a - b)
    return min(d, math.pi - d)


@dataclass(frozen=True)
class Pose2:
    position: Point2
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "position", Point2(*self.position))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def apply(self, p) -> Point2:
        """Map a body-frame point into the parent frame."""
        return Point2(*p).rotated(self.theta) + self.position


@dataclass(frozen=True)
class GripperPose:
    """End-effector pose.

    ``yaw`` is the heading of the finger closing axis. ``tilt`` rolls the
    gripper about that heading; a positive tilt leans the fingertips toward
    ``heading(yaw).perp()``.
    """

    x: float
    y: float
    z: float
    yaw: float
    tilt: float = 0.0

    def __post_init__(self):
        if not -math.pi / 2 <= self.tilt <= math.pi / 2:
            raise ValueError(f"tilt {self.tilt} outside [-pi/2, pi/2]")
        object.__setattr__(self, "yaw", normalize_angle(self.yaw))

    @property
    def xy(self) -> Point2:
        return Point2(self.x, self.y)

    @property
    def orientation(self) -> tuple[float, float]:
        return (self.yaw, self.tilt)


@dataclass(frozen=True)
class Segment:
    p0: Point2
    p1: Point2

    def __post_init__(self):
        object.__setattr__(self, "p0", Point2(*self.p0))
        object.__setattr__(self, "p1", Point2(*self.p1))
        if (self.p1 - self.p0).norm() < TOL:
            raise DegenerateInput("segment endpoints coincide")

    @property
    def length(self) -> float:
        return (self.p1 - self.p0).norm()

    @property
    def direction(self) -> Point2:
        return (self.p1 - self.p0).unit()

    @property
    def angle(self) -> float:
        d = self.p1 - self.p0
        return math.atan2(d.y, d.x)

    @property
    def midpoint(self) -> Point2:
        return (self.p0 + self.p1) * 0.5

    def outward_normal(self) -> Point2:
        """Right-hand normal; points out of a CCW polygon owning this edge."""
        d = self.direction
        return Point2(d.y, -d.x)


def signed_area(points: Sequence) -> float:
    n = len(points)
    acc = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


@dataclass(frozen=True)
class Polygon:
    vertices: tuple

    def __post_init__(self):
        verts = tuple(Point2(float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise DegenerateInput("polygon needs at least 3 vertices")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise ValueError("polygon has non-finite coordinates")
        if signed_area(verts) <= 0.0:
            raise DegenerateInput("polygon must be counterclockwise with positive area")
        object.__setattr__(self, "vertices", verts)

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    @classmethod
    def from_any_orientation(cls, points: Iterable) -> "Polygon":
        pts = [Point2(*p) for p in points]
        if signed_area(pts) < 0:
            pts.reverse()
        return cls(tuple(pts))

    def __len__(self):
        return len(self.vertices)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def centroid(self) -> Point2:
        a = 0.0
        cx = cy = 0.0
        n = len(self.vertices)
        for i in range(n):
            x0, y0 = self.vertices[i]
            x1, y1 = self.vertices[(i + 1) % n]
            c = x0 * y1 - x1 * y0
            a += c
            cx += (x0 + x1) * c
            cy += (y0 + y1) * c
        a *= 0.5
        return Point2(cx / (6 * a), cy / (6 * a))

    def edges(self) -> list[Segment]:
        n = len(self.vertices)
        return [Segment(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def transformed(self, pose: Pose2) -> "Polygon":
        return Polygon(tuple(pose.apply(v) for v in self.vertices))

    def translated(self, offset) -> "Polygon":
        return Polygon(tuple(v + offset for v in self.vertices))

    def is_convex(self, tol: float = 1e-12) -> bool:
        n = len(self.vertices)
        for i in range(n):
            a, b, c = self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]
            if (b - a).cross(c - b) < -tol:
                return False
        return True

    def is_simple(self) -> bool:
        edges = self.edges()
        n = len(edges)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if segments_intersect(edges[i].p0, edges[i].p1, edges[j].p0, edges[j].p1):
                    return False
        return True


@dataclass(frozen=True)
class OrientedRect:
    center: Point2
    half_extents: tuple[float, float]
    angle: float

    def __post_init__(self):
        a, b = self.half_extents
        if not a >= b > 0:
            raise DegenerateInput(f"invalid half extents {self.half_extents}")
        object.__setattr__(self, "center", Point2(*self.center))
        object.__setattr__(self, "angle", angle_mod_pi(self.angle))

    @property
    def area(self) -> float:
        a, b = self.half_extents
        return 4.0 * a * b

    @property
    def axes(self) -> tuple[Point2, Point2]:
        u = heading(self.angle)
        return u, u.perp()

    def corners(self) -> list[Point2]:
        u, v = self.axes
        a, b = self.half_extents
        c = self.center
        return [c - u * a - v * b, c + u * a - v * b, c + u * a + v * b, c - u * a + v * b]

    def polygon(self) -> Polygon:
        return Polygon(tuple(self.corners()))

    def edge_centers(self) -> list[Point2]:
        cs = self.corners()
        return [(cs[i] + cs[(i + 1) % 4]) * 0.5 for i in range(4)]


def _cross3(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable) -> Polygon:
    """Monotone-chain hull; collinear boundary points are dropped."""
    pts = sorted(set(Point2(float(p[0]), float(p[1])) for p in points))
    if len(pts) < 3:
        raise DegenerateInput("convex hull needs at least 3 distinct points")
    lower: list[Point2] = []
    for p in pts:
        while len(lower) >= 2 and _cross3(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point2] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross3(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3 or signed_area(hull) < TOL * TOL:
        raise DegenerateInput("points are collinear")
    return Polygon(tuple(hull))


def min_area_rect(poly) -> OrientedRect:
    """Minimum-area enclosing rectangle by rotating calipers over hull edges."""
    verts = poly.vertices if isinstance(poly, Polygon) else poly
    hull = convex_hull(verts).vertices
    n = len(hull)
    best = None
    for i in range(n):
        u = (hull[(i + 1) % n] - hull[i]).unit()
        v = u.perp()
        pu = [u.dot(p) for p in hull]
        pv = [v.dot(p) for p in hull]
        lo_u, hi_u, lo_v, hi_v = min(pu), max(pu), min(pv), max(pv)
        area = (hi_u - lo_u) * (hi_v - lo_v)
        if best is None or area < best[0] * (1.0 - 1e-12):
            best = (area, u, v, lo_u, hi_u, lo_v, hi_v)
    _, u, v, lo_u, hi_u, lo_v, hi_v = best
    center = u * ((lo_u + hi_u) / 2) + v * ((lo_v + hi_v) / 2)
    eu, ev = (hi_u - lo_u) / 2, (hi_v - lo_v) / 2
    if eu >= ev:
        return OrientedRect(center, (eu, ev), math.atan2(u.y, u.x))
    return OrientedRect(center, (ev, eu), math.atan2(v.y, v.x))


def point_segment_distance(p, a, b) -> float:
    return (Point2(*p) - _project_clamped(p, a, b)).norm()


def _project_clamped(p, a, b) -> Point2:
    a, b, p = Point2(*a), Point2(*b), Point2(*p)
    d = b - a
    dd = d.dot(d)
    if dd == 0.0:
        return a
    t = min(1.0, max(0.0, (p - a).dot(d) / dd))
    return a + d * t


def foot_of_perpendicular(p, seg: Segment) -> Point2:
    """Orthogonal projection of ``p`` onto ``seg``, clamped to its endpoints."""
    return _project_clamped(p, seg.p0, seg.p1)


def foot_is_interior(p, seg: Segment) -> bool:
    d = seg.p1 - seg.p0
    t = (Point2(*p) - seg.p0).dot(d) / d.dot(d)
    return 0.0 < t < 1.0


def nearest_edge(poly: Polygon, p) -> tuple[Segment, float]:
    seg, dist, _ = nearest_edge_index(poly, p)
    return seg, dist


def nearest_edge_index(poly: Polygon, p) -> tuple[Segment, float, int]:
    best = None
    for i, e in enumerate(poly.edges()):
        d = point_segment_distance(p, e.p0, e.p1)
        if best is None or d < best[1]:
            best = (e, d, i)
    return best


def point_in_polygon(p, poly: Polygon) -> bool:
    """Inside test; points on the boundary (within 1e-9 m) count as inside."""
    p = Point2(*p)
    verts = poly.vertices
    n = len(verts)
    for i in range(n):
        if point_segment_distance(p, verts[i], verts[(i + 1) % n]) <= TOL:
            return True
    inside = False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x:
                inside = not inside
    return inside


def points_in_polygon(points, poly: Polygon) -> np.ndarray:
    """Vectorised ``point_in_polygon`` over an (N, 2) array."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    px, py = pts[:, 0], pts[:, 1]
    verts = np.array(poly.vertices, dtype=float)
    a, b = verts, np.roll(verts, -1, axis=0)
    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)
    for (ax, ay), (bx, by) in zip(a, b):
        dx, dy = bx - ax, by - ay
        t = np.clip(((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
        on_edge |= np.hypot(px - (ax + t * dx), py - (ay + t * dy)) <= TOL
        crosses = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = ax + (py - ay) * dx / dy
        inside ^= crosses & (px < x)
    return inside | on_edge


def _rdp(chain: list[Point2], epsilon: float) -> list[Point2]:
    if len(chain) <= 2:
        return list(chain)
    a, b = chain[0], chain[-1]
    dmax, index = -1.0, 0
    for i in range(1, len(chain) - 1):
        d = point_segment_distance(chain[i], a, b)
        if d > dmax:
            dmax, index = d, i
    if dmax > epsilon:
        return _rdp(chain[: index + 1], epsilon)[:-1] + _rdp(chain[index:], epsilon)
    return [a, b]


def approx_polygon(contour: Polygon, epsilon: float) -> Polygon:
    """Closed Ramer-Douglas-Peucker simplification.

    The ring is split at its diameter pair (the two vertices farthest apart).
    Both are extreme points, they always survive, and any subset containing
    them has the same diameter pair, so the simplification is idempotent.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    verts = list(contour.vertices)
    n = len(verts)
    i0, i1, dbest = 0, 1, -1.0
    for i in range(n):
        for j in range(i + 1, n):
            d = (verts[i] - verts[j]).norm()
            if d > dbest:
                i0, i1, dbest = i, j, d
    first = _rdp(verts[i0: i1 + 1], epsilon)
    second = _rdp(verts[i1:] + verts[: i0 + 1], epsilon)
    out = first[:-1] + second[:-1]
    if len(out) < 3 or signed_area(out) <= TOL * TOL:
        raise DegenerateInput("simplified polygon has fewer than 3 vertices")
    # keep the original cyclic starting point when it survives
    start = out.index(verts[0]) if verts[0] in out else 0
    return Polygon(tuple(out[start:] + out[:start]))


def rotate_to_lexmin(points: Sequence[Point2]) -> list[Point2]:
    start = min(range(len(points)), key=lambda i: (points[i].x, points[i].y))
    return list(points[start:]) + list(points[:start])


def segments_intersect(p1, p2, q1, q2) -> bool:
    """True when the closed segments share at least one point."""
    d1 = _cross3(q1, q2, p1)
    d2 = _cross3(q1, q2, p2)
    d3 = _cross3(p1, p2, q1)
    d4 = _cross3(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) - TOL <= c[0] <= max(a[0], b[0]) + TOL
                and min(a[1], b[1]) - TOL <= c[1] <= max(a[1], b[1]) + TOL)

    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def segment_intersection_param(p0, p1, q0, q1) -> float | None:
    """Parameter t along p0->p1 where it crosses q0-q1, or None."""
    p0, p1, q0, q1 = map(lambda v: Point2(*v), (p0, p1, q0, q1))
    r, s = p1 - p0, q1 - q0
    denom = r.cross(s)
    if abs(denom) < 1e-15:
        return None
    t = (q0 - p0).cross(s) / denom
    u = (q0 - p0).cross(r) / denom
    if -TOL <= t <= 1 + TOL and -TOL <= u <= 1 + TOL:
        return t
    return None


def ray_exit_distance(origin, direction, poly: Polygon) -> tuple[float, int]:
    """Distance along a unit ray from an interior point to the boundary and the edge index hit."""
    o, d = Point2(*origin), Point2(*direction)
    best = (math.inf, -1)
    for i, e in enumerate(poly.edges()):
        s = e.p1 - e.p0
        denom = d.cross(s)
        if abs(denom) < 1e-15:
            continue
        t = (e.p0 - o).cross(s) / denom
        u = (e.p0 - o).cross(d) / denom
        if t >= -TOL and -TOL <= u <= 1 + TOL and t < best[0]:
            best = (max(t, 0.0), i)
    return best


def clip_convex(subject: Sequence[Point2], clip: Polygon) -> list[Point2]:
    """Sutherland-Hodgman clip of ``subject`` against a convex CCW polygon."""
    out = list(subject)
    cv = clip.vertices
    n = len(cv)
    for i in range(n):
        a, b = cv[i], cv[(i + 1) % n]
        inp, out = out, []
        if not inp:
            break
        for j in range(len(inp)):
            cur, prev = inp[j], inp[j - 1]
            cur_in = _cross3(a, b, cur) >= 0
            prev_in = _cross3(a, b, prev) >= 0
            if cur_in:
                if not prev_in:
                    out.append(_line_hit(prev, cur, a, b))
                out.append(cur)
            elif prev_in:
                out.append(_line_hit(prev, cur, a, b))
    return out


def _line_hit(p, q, a, b) -> Point2:
    p, q, a, b = Point2(*p), Point2(*q), Point2(*a), Point2(*b)
    r, s = q - p, b - a
    denom = r.cross(s)
    if denom == 0:
        return q
    t = (a - p).cross(s) / denom
    return p + r * t


def intersection_area(p: Polygon, q: Polygon) -> float:
    """Overlap area of two convex polygons."""
    if bbox_gap(p, q) > 0.0:
        return 0.0
    pts = clip_convex(p.vertices, q)
    if len(pts) < 3:
        return 0.0
    return max(0.0, signed_area(pts))


def iou(p: Polygon, q: Polygon) -> float:
    inter = intersection_area(p, q)
    return inter / (p.area + q.area - inter)


def bbox_gap(p: Polygon, q: Polygon) -> float:
    """Distance between axis-aligned bounding boxes, a lower bound on clearance."""
    ax0, ay0, ax1, ay1 = p.bounds()
    bx0, by0, bx1, by1 = q.bounds()
    dx = max(bx0 - ax1, ax0 - bx1, 0.0)
    dy = max(by0 - ay1, ay0 - by1, 0.0)
    return math.hypot(dx, dy)


def polygons_clearance(p: Polygon, q: Polygon) -> float:
    """Minimum distance between two convex polygons; zero when they touch or overlap."""
    if intersection_area(p, q) > 0.0:
        return 0.0
    if any(point_in_polygon(v, q) for v in p.vertices) or any(point_in_polygon(v, p) for v in q.vertices):
        return 0.0
    best = math.inf
    for a, b in ((p, q), (q, p)):
        for v in a.vertices:
            for e in b.edges():
                best = min(best, point_segment_distance(v, e.p0, e.p1))
    return best


def swept_hull(poly: Polygon, offset) -> Polygon:
    """Region covered by a convex polygon translated along ``offset``."""
    if Point2(*offset).norm() < TOL:
        return poly
    return convex_hull(list(poly.vertices) + [v + offset for v in poly.vertices])


def rect_polygon(length: float, width: float) -> Polygon:
    """Axis-aligned rectangle centered at the origin, long side along x."""
    a, b = length / 2, width / 2
    return Polygon(((-a, -b), (a, -b), (a, b), (-a, b)))
