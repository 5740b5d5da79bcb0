"""Geometric perception over point clouds and object contours.

Stands in for the camera front end: clouds are synthesised from scenes, the
table plane is found with RANSAC, and object poses and keypoints come from
contour geometry.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInput, NoConsensus, TooFewPoints
from .geometry import (
    Point2,
    Polygon,
    Pose2,
    Segment,
    approx_polygon,
    convex_hull,
    min_area_rect,
    points_in_polygon,
    rotate_to_lexmin,
)

log = logging.getLogger(__name__)

DEFAULT_CAMERA_HEIGHT = 0.74
MIN_NO_CONSENSUS_FRACTION = 0.10


@dataclass(frozen=True)
class PerceptionConfig:
    voxel_leaf: float = 0.005
    outlier_k: int = 8
    outlier_stddev_mult: float = 1.0
    ransac_dist: float = 0.005
    ransac_iters: int = 500
    # not stated anywhere for keypoint extraction; 2 mm is a working guess
    approx_epsilon: float = 0.002
    rng_seed: int = 0
    min_edge_length: float = 0.10

    def __post_init__(self):
        for name in ("voxel_leaf", "outlier_k", "outlier_stddev_mult", "ransac_dist",
                     "ransac_iters", "approx_epsilon", "min_edge_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class PlaneModel:
    normal: tuple[float, float, float]
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise DegenerateInput("zero plane normal")
        n = n / norm
        off = float(self.offset) / norm
        if n[2] < 0:
            n, off = -n, -off
        object.__setattr__(self, "normal", tuple(float(c) for c in n))
        object.__setattr__(self, "offset", off)

    def distances(self, points: np.ndarray) -> np.ndarray:
        return np.abs(points @ np.asarray(self.normal) - self.offset)

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Origin and in-plane axes (u, v) used for the 2D table frame."""
        n = np.asarray(self.normal)
        origin = n * self.offset
        u = np.array([1.0, 0.0, 0.0]) - n[0] * n
        u /= np.linalg.norm(u)
        v = np.cross(n, u)
        return origin, u, v

    def project(self, points: np.ndarray) -> np.ndarray:
        origin, u, v = self.frame()
        rel = np.asarray(points, dtype=float) - origin
        return np.column_stack([rel @ u, rel @ v])


@dataclass(frozen=True)
class TableModel:
    plane: PlaneModel
    support_polygon: Polygon
    edges: tuple[Segment, ...]
    dominant_edge: Segment

    @classmethod
    def from_polygon(cls, polygon: Polygon, plane: PlaneModel | None = None,
                     min_edge_length: float = 0.10) -> "TableModel":
        plane = plane or PlaneModel((0.0, 0.0, 1.0), 0.0)
        edges = tuple(e for e in polygon.edges() if e.length > min_edge_length)
        if not edges:
            raise DegenerateInput("table has no edge longer than the minimum")
        return cls(plane, polygon, edges, _longest(edges))


def _longest(edges) -> Segment:
    best = edges[0]
    for e in edges[1:]:
        if e.length > best.length:
            best = e
    return best


# -- point cloud I/O ---------------------------------------------------------

def as_cloud(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float).reshape(-1, 3)
    if not np.all(np.isfinite(arr)):
        raise ValueError("point cloud contains non-finite coordinates")
    return arr


def read_xyz(path) -> np.ndarray:
    text = Path(path).read_text()
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    for i, r in enumerate(rows):
        if len(r) != 3:
            raise ValueError(f"{path}:{i + 1}: expected 'x y z', got {len(r)} fields")
    return as_cloud([[float(c) for c in r] for r in rows])


def write_xyz(path, cloud) -> None:
    cloud = as_cloud(cloud)
    with open(path, "w") as fh:
        for x, y, z in cloud:
            fh.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")


# -- filtering -----------------------------------------------------------------

def voxel_downsample(cloud, leaf: float) -> np.ndarray:
    """Replace the points in every occupied voxel by their centroid."""
    if leaf <= 0:
        raise ValueError("leaf must be positive")
    cloud = as_cloud(cloud)
    if len(cloud) == 0:
        return cloud
    keys = np.floor(cloud / leaf).astype(np.int64)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    sums = np.zeros((len(uniq), 3))
    np.add.at(sums, inverse, cloud)
    counts = np.bincount(inverse, minlength=len(uniq)).astype(float)
    return sums / counts[:, None]


def outlier_mask(cloud, k: int, stddev_mult: float) -> np.ndarray:
    """Boolean keep-mask of statistical outlier removal."""
    cloud = as_cloud(cloud)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(cloud) <= k:
        raise TooFewPoints(f"need more than {k} points, got {len(cloud)}")
    dist, _ = cKDTree(cloud).query(cloud, k=k + 1)
    mean_d = dist[:, 1:].mean(axis=1)
    threshold = mean_d.mean() + stddev_mult * mean_d.std()
    # absolute slack keeps perfectly uniform clouds intact despite rounding
    return mean_d <= threshold + 1e-12


def remove_outliers(cloud, k: int, stddev_mult: float) -> np.ndarray:
    cloud = as_cloud(cloud)
    return cloud[outlier_mask(cloud, k, stddev_mult)]


# -- plane segmentation ------------------------------------------------------

def _fit_plane_lsq(points: np.ndarray) -> PlaneModel:
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    n = vt[-1]
    return PlaneModel(tuple(n), float(n @ centroid))


def ransac_plane(cloud, cfg: PerceptionConfig = PerceptionConfig()) -> tuple[PlaneModel, np.ndarray]:
    """Seeded RANSAC plane fit followed by a least-squares refit on the inliers."""
    pts = as_cloud(cloud)
    if len(pts) < 3:
        raise DegenerateInput("RANSAC needs at least 3 points")
    centered = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-9) < 2:
        raise DegenerateInput("points are collinear")
    rng = np.random.default_rng(cfg.rng_seed)
    best_count, best_plane = -1, None
    n_pts = len(pts)
    for _ in range(cfg.ransac_iters):
        i, j, k = rng.choice(n_pts, size=3, replace=False)
        nrm = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        norm = np.linalg.norm(nrm)
        if norm < 1e-12:
            continue
        nrm = nrm / norm
        off = nrm @ pts[i]
        count = int(np.count_nonzero(np.abs(pts @ nrm - off) < cfg.ransac_dist))
        if count > best_count:
            best_count, best_plane = count, (nrm, off)
    if best_plane is None:
        raise DegenerateInput("no non-degenerate sample found")
    nrm, off = best_plane
    inliers = np.flatnonzero(np.abs(pts @ nrm - off) < cfg.ransac_dist)
    if len(inliers) >= 3:
        refit = _fit_plane_lsq(pts[inliers])
        refit_inliers = np.flatnonzero(refit.distances(pts) < cfg.ransac_dist)
        if len(refit_inliers) >= len(inliers):
            plane, inliers = refit, refit_inliers
        else:
            plane = PlaneModel(tuple(nrm), off)
    else:
        plane = PlaneModel(tuple(nrm), off)
    if len(inliers) < MIN_NO_CONSENSUS_FRACTION * n_pts:
        raise NoConsensus(f"best plane explains {len(inliers)}/{n_pts} points")
    log.debug("plane %s, %d/%d inliers", plane, len(inliers), n_pts)
    return plane, inliers


def extract_table(cloud, cfg: PerceptionConfig = PerceptionConfig()) -> TableModel:
    """Denoise, segment the table plane, and fit its outline and edges.

    ``support_polygon`` is the exact convex hull of the projected inliers.
    ``edges`` come from the hull after polygon approximation with
    ``cfg.approx_epsilon``, which merges the short, nearly collinear hull
    segments produced by depth noise into straight edges.
    """
    pts = voxel_downsample(cloud, cfg.voxel_leaf)
    if len(pts) > cfg.outlier_k:
        pts = remove_outliers(pts, cfg.outlier_k, cfg.outlier_stddev_mult)
    plane, inliers = ransac_plane(pts, cfg)
    flat = plane.project(pts[inliers])
    hull = convex_hull([tuple(p) for p in flat])
    fitted = approx_polygon(hull, cfg.approx_epsilon)
    edges = tuple(e for e in fitted.edges() if e.length > cfg.min_edge_length)
    if not edges:
        raise NoConsensus("no straight table edge longer than the minimum")
    return TableModel(plane, hull, edges, _longest(edges))


# -- object pose and keypoints -----------------------------------------------

def estimate_pose_minrect(contour: Polygon) -> tuple[Pose2, tuple[float, float]]:
    rect = min_area_rect(contour)
    a, b = rect.half_extents
    return Pose2(rect.center, rect.angle), (2 * a, 2 * b)


def extract_keypoints(contour: Polygon, cfg: PerceptionConfig = PerceptionConfig()) -> list[Point2]:
    hull = convex_hull(contour.vertices)
    simplified = approx_polygon(hull, cfg.approx_epsilon)
    return rotate_to_lexmin(simplified.vertices)


# -- synthetic sensor --------------------------------------------------------

@dataclass
class SynthCloud:
    points: np.ndarray
    labels: np.ndarray = field(repr=False)

    TABLE, OBJECT, OUTLIER = 0, 1, 2


def synth_cloud(scene, camera_height: float = DEFAULT_CAMERA_HEIGHT, noise_sigma: float = 0.0,
                outlier_fraction: float = 0.0, seed: int = 0, grid_step: float = 0.01,
                outlier_band: float = 0.3) -> SynthCloud:
    """Overhead depth-only cloud of a scene, in a camera-centred frame.

    x/y match the table frame; z points up with the camera at the origin, so
    the bare table lies at ``z = -camera_height``. Each grid cell reports the
    highest surface above it. Outliers are flying pixels spread uniformly
    above the table footprint.
    """
    if camera_height <= 0:
        raise ValueError("camera_height must be positive")
    rng = np.random.default_rng(seed)
    table = scene.table.support_polygon
    xs = [v.x for v in table.vertices]
    ys = [v.y for v in table.vertices]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    nx = int(round((x1 - x0) / grid_step))
    ny = int(round((y1 - y0) / grid_step))
    gx = x0 + (x1 - x0) * np.arange(nx + 1) / nx
    gy = y0 + (y1 - y0) * np.arange(ny + 1) / ny
    objects = [(o.world_footprint, o.z + o.height) for o in scene.objects]
    objects.sort(key=lambda t: -t[1])
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    xy = np.column_stack([X.ravel(), Y.ravel()])
    xy = xy[points_in_polygon(xy, table)]
    z = np.zeros(len(xy))
    labels = np.full(len(xy), SynthCloud.TABLE, dtype=np.int8)
    free = np.ones(len(xy), dtype=bool)
    for fp, top in objects:
        hit = free & points_in_polygon(xy, fp)
        z[hit], labels[hit] = top, SynthCloud.OBJECT
        free &= ~hit
    pts = np.column_stack([xy, z - camera_height])
    if noise_sigma > 0:
        pts[:, 2] += rng.normal(0.0, noise_sigma, len(pts))
    if outlier_fraction > 0:
        n_out = int(round(outlier_fraction * len(pts) / (1.0 - outlier_fraction)))
        out = np.column_stack([
            rng.uniform(x0, x1, n_out),
            rng.uniform(y0, y1, n_out),
            rng.uniform(0.0, outlier_band, n_out) - camera_height,
        ])
        pts = np.vstack([pts, out])
        labels = np.concatenate([labels, np.full(n_out, SynthCloud.OUTLIER, dtype=np.int8)])
    return SynthCloud(pts, labels)
