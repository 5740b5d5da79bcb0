"""Pose generation for the contact, push-grasp and pry primitives."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EdgeUnreachable, InfeasibleThickness, NoSupport, UnsupportedCategory
from .feasibility import FeasibilityTables, PRY_ALPHAS, pry_probability
from .geometry import (
    TOL,
    GripperPose,
    Point2,
    Polygon,
    Pose2,
    Segment,
    Vec2,
    foot_of_perpendicular,
    heading,
    min_area_rect,
    nearest_edge,
    point_in_polygon,
    ray_exit_distance,
    segment_intersection_param,
)
from .sim.world import DESKTOP, RULERS, SMALL, ObjectState, Scene

ALIGN_TIE_TOL = 1e-9


@dataclass(frozen=True)
class GripperModel:
    finger_spacing_W0: float = 0.030
    finger_length_L: float = 0.083
    open_deformation_Hmax: float = 0.033
    close_deformation_Hmin: float = 0.039

    @property
    def max_opening(self) -> float:
        return self.finger_spacing_W0 + 2 * self.open_deformation_Hmax


@dataclass(frozen=True)
class PrimitiveConfig:
    theta_p: float = math.radians(30)
    theta_g: float = math.radians(45)
    overhang_delta: float = 0.015
    depth_mult_contact: float = 1.5
    depth_mult_noncontact: float = 0.5
    depth_mult_on_support: float = 1.0
    default_pry_alpha: float = math.radians(9)
    feasible_threshold: float = 0.9
    paper_grasp_offset: float = 0.070

    def __post_init__(self):
        for name in ("theta_p", "theta_g"):
            if not 0 < getattr(self, name) < math.pi / 2:
                raise ValueError(f"{name} must lie in (0, pi/2)")
        for name in ("depth_mult_contact", "depth_mult_noncontact", "depth_mult_on_support", "overhang_delta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ContactGraspPlan:
    object_id: str
    grasp_pose: GripperPose
    depth: float
    mode: str
    offset: tuple[float, float] = (0.0, 0.0)
    scene_key: str = ""


@dataclass(frozen=True)
class PushGraspPlan:
    object_id: str
    support_id: str
    direction_d: Vec2
    target_edge: Segment
    p_p_2d: Point2
    p_g_2d: Point2
    P_push_s: GripperPose
    P_push_e: GripperPose
    P_grasp: GripperPose
    scene_key: str = ""


@dataclass(frozen=True)
class PryPlan:
    object_id: str
    contact_pose: GripperPose
    alpha: float
    pull_vector: Vec2
    place_pose: Pose2
    opening_angle: float = 0.0
    scene_key: str = ""


# -- contact grasp ---------------------------------------------------------------

def grasp_depth(obj: ObjectState, mode: str, cfg: PrimitiveConfig) -> float:
    if mode == "noncontact":
        return cfg.depth_mult_noncontact * obj.height
    if mode != "contact":
        raise ValueError(f"unknown grasp mode {mode!r}")
    if obj.supported_by != DESKTOP:
        # shallower on a supporting object so its top layer is not grasped too
        return cfg.depth_mult_on_support * obj.height
    return cfg.depth_mult_contact * obj.height


def plan_contact_grasp(obj: ObjectState, scene: Scene, cfg: PrimitiveConfig = PrimitiveConfig(),
                       mode: str = "contact") -> ContactGraspPlan:
    if obj.category not in SMALL and obj.category != "paper":
        raise UnsupportedCategory(f"contact grasp does not handle {obj.category}")
    depth = grasp_depth(obj, mode, cfg)
    rect = obj.rect
    position = rect.center
    if obj.category == "paper":
        # gather the sheet at a fixed distance in from the nearer short edge
        u = heading(rect.angle)
        a = rect.half_extents[0]
        position = rect.center - u * (a - cfg.paper_grasp_offset)
    # fingertip target; may lie below the table plane, where the table stops the fingers
    z = obj.top - depth
    pose = GripperPose(position.x, position.y, z, rect.angle)
    return ContactGraspPlan(obj.id, pose, depth, mode, (0.0, 0.0), scene.fingerprint())


# -- push grasp ------------------------------------------------------------------

def push_direction(obj_theta: float, support: Polygon, obj_pos) -> tuple[Vec2, Segment]:
    """Body axis to push along and the support edge it should reach.

    The target edge is the support edge nearest the object. Of the long and
    short body axes, signed toward that edge, the one best aligned with the
    edge's outward normal wins. Exact 45 degree ties go to the axis with the
    shorter run to the support boundary, then to the long axis.
    """
    edge, _ = nearest_edge(support, obj_pos)
    n = edge.outward_normal()
    cands = []
    for rank, axis in enumerate((heading(obj_theta), heading(obj_theta).perp())):
        s = axis.dot(n)
        d = axis if s >= 0 else -axis
        cands.append((abs(s), rank, d))
    (al0, _, d0), (al1, _, d1) = cands
    if abs(al0 - al1) > ALIGN_TIE_TOL:
        return (d0 if al0 > al1 else d1), edge
    run0, _ = ray_exit_distance(obj_pos, d0, support)
    run1, _ = ray_exit_distance(obj_pos, d1, support)
    if run1 < run0 - TOL:
        return d1, edge
    return d0, edge


def rotation_direction(obj_theta: float, d) -> int:
    """Tilt sign leaning a gripper with yaw ``obj_theta`` away from push direction ``d``.

    Positive tilt leans toward ``heading(yaw).perp()``. When ``d`` runs along
    the yaw heading the lean is sideways either way and +1 is returned.
    """
    return -1 if heading(obj_theta).perp().dot(Point2(*d)) > TOL else 1


def rotate(pose: GripperPose, angle: float, r: int) -> GripperPose:
    return GripperPose(pose.x, pose.y, pose.z, pose.yaw, r * angle)


def find_book_support(obj: ObjectState, scene: Scene) -> ObjectState | None:
    best = None
    for o in scene.objects:
        if o.category != "book" or o.id == obj.id or o.top > obj.z + 1e-9:
            continue
        if point_in_polygon(obj.position, o.world_footprint):
            if best is None or o.top > best.top:
                best = o
    return best


def support_surface(obj: ObjectState, scene: Scene) -> tuple[str, Polygon]:
    book = find_book_support(obj, scene)
    if book is not None:
        return book.id, book.world_footprint
    table = scene.table.support_polygon
    if not point_in_polygon(obj.position, table):
        raise NoSupport(f"{obj.id} is not above the desktop")
    return DESKTOP, table


def plan_push_grasp(obj: ObjectState, scene: Scene, cfg: PrimitiveConfig = PrimitiveConfig()) -> PushGraspPlan:
    if obj.category not in RULERS:
        raise UnsupportedCategory(f"push grasp does not handle {obj.category}")
    support_id, support = support_surface(obj, scene)
    theta = obj.pose.theta
    d, edge = push_direction(theta, support, obj.position)
    p_g = foot_of_perpendicular(obj.position, edge)

    centers = min_area_rect(obj.world_footprint).edge_centers()
    p_p = centers[0]
    best = (p_p - p_g).norm()
    for c in centers[1:]:
        dist = (c - p_g).norm()
        if dist > best:
            p_p, best = c, dist

    check_push_path(p_p, p_g, support, edge)

    z = obj.top
    P_p = GripperPose(p_p.x, p_p.y, z, theta)
    P_g = GripperPose(p_g.x, p_g.y, z, edge.angle)
    r = rotation_direction(theta, d)
    P_push_s = rotate(P_p, cfg.theta_p, r)
    P_push_e = GripperPose(P_g.x, P_g.y, P_g.z, P_push_s.yaw, P_push_s.tilt)
    P_grasp = rotate(P_g, cfg.theta_g, r)
    return PushGraspPlan(obj.id, support_id, d, edge, p_p, p_g, P_push_s, P_push_e, P_grasp, scene.fingerprint())


def check_push_path(p_p: Point2, p_g: Point2, support: Polygon, target: Segment) -> None:
    """Raise EdgeUnreachable if the path p_p -> p_g leaves ``support`` before ``target``.

    Only non-convex supports can trigger this; on a convex one the first exit
    of the path is p_g itself.
    """
    travel = p_g - p_p
    if travel.norm() < TOL:
        return
    for e in support.edges():
        if e == target or travel.dot(e.outward_normal()) <= 0:
            continue
        t = segment_intersection_param(p_p, p_g, e.p0, e.p1)
        if t is None or t >= 1.0 - TOL:
            continue
        hit = p_p + travel * t
        if (hit - p_g).norm() <= TOL:
            continue
        raise EdgeUnreachable(f"push path leaves the support through another edge at {tuple(hit)}")


# -- pry grasp -------------------------------------------------------------------

def select_pry_alpha(tables: FeasibilityTables, thickness: float, cfg: PrimitiveConfig) -> float:
    if pry_probability(tables, thickness, cfg.default_pry_alpha) >= cfg.feasible_threshold:
        return cfg.default_pry_alpha
    for a in sorted(PRY_ALPHAS, key=lambda a: (abs(a - cfg.default_pry_alpha), a)):
        if pry_probability(tables, thickness, a) >= cfg.feasible_threshold:
            return a
    raise InfeasibleThickness(f"no prying angle reaches p >= {cfg.feasible_threshold} at {thickness * 1e3:.1f} mm")


def spine_edge(book: ObjectState) -> Segment:
    """Book spine: the long side on the body -y side of the min-area rectangle."""
    rect = book.rect
    u, v = rect.axes
    a, b = rect.half_extents
    c = rect.center - v * b
    return Segment(c - u * a, c + u * a)


def plan_pry_grasp(book: ObjectState, stack_target: Pose2, cfg: PrimitiveConfig = PrimitiveConfig(),
                   tables: FeasibilityTables | None = None, gripper: GripperModel = GripperModel(),
                   scene_key: str = "") -> PryPlan:
    if book.category != "book" or book.material.thickness is None:
        raise UnsupportedCategory(f"pry grasp needs a book with known thickness, got {book.category}")
    tables = tables or FeasibilityTables()
    thickness = book.material.thickness
    alpha = select_pry_alpha(tables, thickness, cfg)
    spine = spine_edge(book)
    mid = spine.midpoint
    inward = (book.rect.center - mid).unit()
    yaw = math.atan2(inward.y, inward.x)
    opening = math.atan2(thickness, gripper.finger_length_L)
    contact = GripperPose(mid.x, mid.y, book.z, yaw, 0.0)
    return PryPlan(book.id, contact, alpha, inward, stack_target, opening, scene_key)
