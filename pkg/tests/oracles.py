"""Independent brute-force checks used by the test suite.

Nothing here calls into the code under test except for plain value types.
"""
import math

import numpy as np


def hull_edges_bruteforce(points):
    """Directed edges (i, j) with every other point strictly left or on the segment interior.

    O(n^3): every ordered pair is tested against all remaining points.
    """
    pts = np.array(sorted(set(tuple(map(float, p)) for p in points)))
    edges = set()
    n = len(pts)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a, b = pts[i], pts[j]
            others = np.delete(pts, [i, j], axis=0)
            ab = b - a
            rel = others - a
            c = ab[0] * rel[:, 1] - ab[1] * rel[:, 0]
            if np.any(c < 0):
                continue
            on = c == 0
            # collinear points must lie strictly between a and b, else (a, b) is not maximal
            t = rel[on] @ ab / (ab @ ab)
            if np.all((t > 0) & (t < 1)):
                edges.add((tuple(a), tuple(b)))
    return edges


def bbox_area_sweep(points, step_deg=0.05):
    """Smallest axis-aligned bounding-box area over a rotation sweep of [0, 90) degrees."""
    pts = np.asarray(points, dtype=float)
    best = math.inf
    for k in range(int(round(90 / step_deg))):
        a = math.radians(k * step_deg)
        c, s = math.cos(a), math.sin(a)
        x = pts[:, 0] * c + pts[:, 1] * s
        y = -pts[:, 0] * s + pts[:, 1] * c
        best = min(best, (x.max() - x.min()) * (y.max() - y.min()))
    return best


def _bbox_area(pts, a):
    c, s = math.cos(a), math.sin(a)
    x = pts[:, 0] * c + pts[:, 1] * s
    y = -pts[:, 0] * s + pts[:, 1] * c
    return (x.max() - x.min()) * (y.max() - y.min())


def bbox_area_sweep_refined(points, step_deg=0.05):
    """Angle sweep at ``step_deg``, then each sampled local minimum polished by golden section.

    A raw sweep overshoots the true minimum by up to ~step^2 relative; the
    polish brings it to floating-point precision so the comparison can be tight.
    """
    pts = np.asarray(points, dtype=float)
    n = int(round(90 / step_deg))
    h = math.radians(step_deg)
    ang = np.arange(n) * h
    x = np.outer(np.cos(ang), pts[:, 0]) + np.outer(np.sin(ang), pts[:, 1])
    y = -np.outer(np.sin(ang), pts[:, 0]) + np.outer(np.cos(ang), pts[:, 1])
    vals = (x.max(1) - x.min(1)) * (y.max(1) - y.min(1))
    best = vals.min()
    g = (math.sqrt(5) - 1) / 2
    for k in np.flatnonzero((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1))):
        lo, hi = (k - 1) * h, (k + 1) * h
        for _ in range(100):
            a, b = hi - g * (hi - lo), lo + g * (hi - lo)
            if _bbox_area(pts, a) < _bbox_area(pts, b):
                hi = b
            else:
                lo = a
        best = min(best, _bbox_area(pts, (lo + hi) / 2))
    return best


def seg_dist(p, a, b):
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def nearest_edge_exhaustive(vertices, p):
    n = len(vertices)
    dists = [seg_dist(p, vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    m = min(dists)
    # rounding differs between formulas; ties within 1e-15 go to the lowest index
    idx = next(i for i, d in enumerate(dists) if d <= m + 1e-15)
    return idx, m


def random_convex_polygon(rng, n=8, radius=1.0):
    """Convex polygon from sorted random angles on a jittered circle, CCW."""
    angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    r = radius * rng.uniform(0.7, 1.0)
    cx, cy = rng.uniform(-1, 1, 2)
    return [(cx + r * math.cos(a), cy + r * math.sin(a)) for a in angles]


def voxel_centroids_bruteforce(points, leaf):
    groups = {}
    for p in points:
        key = tuple(int(math.floor(c / leaf)) for c in p)
        groups.setdefault(key, []).append(p)
    return {k: np.mean(v, axis=0) for k, v in groups.items()}


def polygon_area_grid(poly_contains, bounds, n=400):
    """Area estimate by midpoint sampling; used only to sanity check IoU helpers."""
    (x0, y0), (x1, y1) = bounds
    xs = np.linspace(x0, x1, n, endpoint=False) + (x1 - x0) / (2 * n)
    ys = np.linspace(y0, y1, n, endpoint=False) + (y1 - y0) / (2 * n)
    cell = (x1 - x0) * (y1 - y0) / (n * n)
    return sum(cell for x in xs for y in ys if poly_contains((x, y)))
