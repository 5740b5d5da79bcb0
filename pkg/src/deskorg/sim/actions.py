"""Kinematic execution of primitives against a Scene value.

Every action takes a Scene and returns an ActionResult holding a new Scene;
nothing is mutated. Pushing is a pure translation (no rotation), grasp success
comes from the feasibility tables, and placement checks are geometric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import NoOverhang, NothingInHand, StalePlanError
from ..feasibility import (
    FeasibilityTables,
    contact_grasp_probability,
    paper_grasp_feasible,
    pry_probability,
    push_grasp_probability,
)
from ..geometry import (
    Point2,
    Polygon,
    Pose2,
    Segment,
    axis_angle_diff,
    heading,
    intersection_area,
    min_area_rect,
    point_in_polygon,
    polygons_clearance,
    swept_hull,
)
from ..primitives import ContactGraspPlan, PrimitiveConfig, PryPlan, PushGraspPlan
from .world import DESKTOP, OVERLAP_AREA_TOL, TRIANGLE_RULERS, ObjectState, Scene, support_graph

SUCCESS = "success"
FAILURE = "failure"
CAUSES = ("none", "infeasible", "cograsp", "placement_out_of_region", "collision", "edge_unreachable")
MODES = ("deterministic", "stochastic")
PEN_HOLDER = "PEN_HOLDER"
TARGETS = ("pen_holder", "stack_zone", "aligned_pose")
# bisection aims this far past the separation threshold so rounding in the
# final pose update cannot leave the gap a hair short of it
SEPARATION_SLACK = 1e-9


def _default_yaw_noise() -> dict:
    return {c: math.radians(6.0) for c in sorted(TRIANGLE_RULERS)}


@dataclass(frozen=True)
class SimConfig:
    primitives: PrimitiveConfig = field(default_factory=PrimitiveConfig)
    tables: FeasibilityTables = field(default_factory=FeasibilityTables, compare=False)
    separation_threshold: float = 0.010
    stack_tolerance: float = 0.005
    # in-hand yaw noise (radians, one sigma) per category; only drawn in stochastic mode
    yaw_noise: dict = field(default_factory=_default_yaw_noise, compare=False)

    def __post_init__(self):
        if self.separation_threshold <= 0 or self.stack_tolerance <= 0:
            raise ValueError("separation_threshold and stack_tolerance must be positive")
        if any(s < 0 for s in self.yaw_noise.values()):
            raise ValueError("yaw noise sigma must be non-negative")


@dataclass(frozen=True)
class ActionResult:
    outcome: str
    cause: str
    scene_after: Scene
    probability: float | None = None

    def __post_init__(self):
        if self.outcome not in (SUCCESS, FAILURE) or self.cause not in CAUSES:
            raise ValueError(f"bad result {self.outcome}/{self.cause}")
        if (self.cause == "none") != (self.outcome == SUCCESS):
            raise ValueError("cause must be 'none' exactly when the action succeeds")

    @property
    def ok(self) -> bool:
        return self.outcome == SUCCESS


def _ok(scene: Scene, p: float | None = None) -> ActionResult:
    return ActionResult(SUCCESS, "none", scene, p)


def _fail(scene: Scene, cause: str, p: float | None = None) -> ActionResult:
    return ActionResult(FAILURE, cause, scene, p)


# -- helpers -------------------------------------------------------------------

def overhang(obj: ObjectState, edge: Segment) -> float:
    """Largest distance any footprint vertex lies past the edge line (outward positive)."""
    n = edge.outward_normal()
    return max((v - edge.p0).dot(n) for v in obj.world_footprint.vertices)


def _carried(scene: Scene, root: str, graph: dict[str, str]) -> list[str]:
    """``root`` plus everything resting on it, transitively, in id order."""
    out, frontier = {root}, [root]
    while frontier:
        cur = frontier.pop()
        for k, v in graph.items():
            if v == cur and k not in out:
                out.add(k)
                frontier.append(k)
    return sorted(out)


def _below(graph: dict[str, str], obj_id: str) -> set[str]:
    out, cur = set(), graph[obj_id]
    while cur != DESKTOP:
        out.add(cur)
        cur = graph[cur]
    return out


def _vertical_overlap(a: ObjectState, b: ObjectState) -> bool:
    return a.z < b.top - 1e-9 and b.z < a.top - 1e-9


def _translate_group(scene: Scene, group: list[str], offset: Point2, graph: dict[str, str],
                     ignore: set[str]) -> tuple[Scene | None, str]:
    """Move ``group`` by ``offset``; return (new scene, "") or (None, cause)."""
    members = [scene.get(i) for i in group]
    skip = set(group) | ignore
    for m in members:
        swept = swept_hull(m.world_footprint, offset)
        if intersection_area(swept, scene.pen_holder_region) >= OVERLAP_AREA_TOL:
            return None, "collision"
        for o in scene.objects:
            if o.id in skip or not _vertical_overlap(m, o):
                continue
            if intersection_area(swept, o.world_footprint) >= OVERLAP_AREA_TOL:
                return None, "collision"
    new = scene
    for m in members:
        new = new.with_object(m.moved(Pose2(m.position + offset, m.pose.theta)))
    for m in members:
        sup = graph[m.id]
        if sup in group:
            continue
        area = scene.table.support_polygon if sup == DESKTOP else new.get(sup).world_footprint
        if not point_in_polygon(new.get(m.id).position, area):
            return None, "edge_unreachable"
    if support_graph(new) != graph:
        return None, "collision"
    return new, ""


def _draw(mode: str, rng: np.random.Generator | None, p: float, threshold: float) -> bool:
    if mode == "deterministic":
        return p >= threshold
    if mode != "stochastic":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("stochastic mode needs an rng")
    return bool(rng.random() < p)


def _body_center(obj: ObjectState) -> Point2:
    v = obj.footprint.vertices
    xs, ys = [p.x for p in v], [p.y for p in v]
    return Point2((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2)


def _pose_centered(obj: ObjectState, center: Point2, theta: float) -> Pose2:
    """Pose putting the body bounding-box center at ``center`` with yaw ``theta``."""
    return Pose2(Point2(*center) - _body_center(obj).rotated(theta), theta)


# -- actions -------------------------------------------------------------------

def apply_push(scene: Scene, obj_id: str, plan: PushGraspPlan, cfg: SimConfig = SimConfig()) -> ActionResult:
    if plan.scene_key and plan.scene_key != scene.fingerprint():
        raise StalePlanError(f"push plan for {obj_id} was made for a different scene state")
    obj = scene.get(obj_id)
    delta = cfg.primitives.overhang_delta
    s = overhang(obj, plan.target_edge)
    if s >= delta - 1e-12:
        return _ok(scene)
    rate = plan.direction_d.dot(plan.target_edge.outward_normal())
    if rate <= 1e-12:
        return _fail(scene, "edge_unreachable")
    offset = plan.direction_d * ((delta - s) / rate)
    graph = support_graph(scene)
    sup = graph[obj_id]
    # a ruler lying on paper drags the sheet (and whatever else sits on it) along
    root = sup if sup != DESKTOP and scene.get(sup).category == "paper" else obj_id
    group = _carried(scene, root, graph)
    new, cause = _translate_group(scene, group, offset, graph, _below(graph, root))
    if new is None:
        return _fail(scene, cause)
    return _ok(new)


def apply_grasp(scene: Scene, obj_id: str, plan, mode: str = "deterministic", cfg: SimConfig = SimConfig(),
                rng: np.random.Generator | None = None) -> ActionResult:
    if scene.in_hand is not None:
        raise ValueError(f"hand already holds {scene.in_hand.id}")
    obj = scene.get(obj_id)
    graph = support_graph(scene)
    if any(v == obj_id for v in graph.values()):
        raise ValueError(f"{obj_id} still supports other objects")
    pc, tables = cfg.primitives, cfg.tables
    if isinstance(plan, PushGraspPlan):
        if overhang(obj, plan.target_edge) < pc.overhang_delta - 1e-9:
            raise NoOverhang(f"{obj_id} does not overhang its support edge by {pc.overhang_delta} m")
        sup = graph[obj_id]
        if sup != DESKTOP and scene.get(sup).category == "paper":
            return _fail(scene, "cograsp", 0.0)
        p = push_grasp_probability(tables, obj.category, "desktop" if plan.support_id == DESKTOP else "book")
    elif isinstance(plan, ContactGraspPlan):
        if obj.category == "paper":
            p = 1.0 if paper_grasp_feasible(tables, obj.material.gsm, pc.paper_grasp_offset) else 0.0
        else:
            p = contact_grasp_probability(tables, plan.mode, obj.height, plan.offset)
    elif isinstance(plan, PryPlan):
        p = pry_probability(tables, obj.material.thickness, plan.alpha)
    else:
        raise TypeError(f"unsupported plan type {type(plan).__name__}")
    if not _draw(mode, rng, p, pc.feasible_threshold):
        return _fail(scene, "infeasible", p)
    noise = 0.0
    sigma = cfg.yaw_noise.get(obj.category, 0.0)
    if mode == "stochastic" and sigma > 0:
        noise = float(rng.normal(0.0, sigma))
    return _ok(replace(scene.without(obj_id), in_hand=obj, hand_yaw_error=noise), p)


def apply_reorient(scene: Scene, theta: float) -> ActionResult:
    """Rotate the held object in place to yaw ``theta``."""
    if scene.in_hand is None:
        raise NothingInHand("reorient with an empty hand")
    o = scene.in_hand
    return _ok(replace(scene, in_hand=o.moved(_pose_centered(o, o.rect.center, theta))))


def apply_place(scene: Scene, target: str, cfg: SimConfig = SimConfig()) -> ActionResult:
    if scene.in_hand is None:
        raise NothingInHand(f"place at {target} with an empty hand")
    obj, err = scene.in_hand, scene.hand_yaw_error
    if target == "pen_holder":
        region = min_area_rect(scene.pen_holder_region)
        placed = obj.moved(_pose_centered(obj, region.center, region.angle + err), z=0.0, supported_by=PEN_HOLDER)
        if not all(point_in_polygon(v, scene.pen_holder_region) for v in placed.world_footprint.vertices):
            return _fail(scene, "placement_out_of_region")
        return _ok(replace(scene, in_hand=None, hand_yaw_error=0.0, stored=scene.stored + (placed,)))
    if target == "stack_zone":
        zone = scene.stack_zone
        return _stack(scene, obj, zone.position, obj.pose.theta, err, cfg, check_alignment=True)
    if target == "aligned_pose":
        zone = scene.paper_zone if obj.category == "paper" else scene.stack_zone
        return _stack(scene, obj, zone.position, obj.pose.theta, err, cfg, check_alignment=False)
    raise ValueError(f"unknown place target {target!r}")


def _stack(scene: Scene, obj: ObjectState, center: Point2, theta: float, err: float, cfg: SimConfig,
           check_alignment: bool) -> ActionResult:
    base = None
    for o in scene.objects:
        if point_in_polygon(center, o.world_footprint) and (base is None or o.top > base.top):
            base = o
    z = 0.0 if base is None else base.top
    placed = obj.moved(_pose_centered(obj, center, theta + err), z=z, supported_by=DESKTOP if base is None else base.id)
    if check_alignment:
        ref = scene.stack_zone.theta if base is None else base.pose.theta
        a, b = placed.rect.half_extents
        shift = (placed.rect.center - Point2(*center)).norm()
        if shift + math.hypot(a, b) * axis_angle_diff(placed.pose.theta, ref) > cfg.stack_tolerance:
            return _fail(scene, "placement_out_of_region")
    for o in scene.objects:
        if o.id == (base.id if base else None) or not _vertical_overlap(placed, o):
            continue
        if intersection_area(placed.world_footprint, o.world_footprint) >= OVERLAP_AREA_TOL:
            return _fail(scene, "collision")
    new = replace(scene, objects=scene.objects + (placed,), in_hand=None, hand_yaw_error=0.0)
    if support_graph(new)[placed.id] != placed.supported_by:
        return _fail(scene, "collision")
    return _ok(new)


def apply_separation_push(scene: Scene, obj_id: str, neighbor_id: str, cfg: SimConfig = SimConfig()) -> ActionResult:
    a, b = scene.get(obj_id), scene.get(neighbor_id)
    thr = cfg.separation_threshold
    c0 = polygons_clearance(a.world_footprint, b.world_footprint)
    if c0 >= thr:
        return _ok(scene)
    u = b.rect.center - a.rect.center
    u = u.unit() if u.norm() > 1e-12 else heading(a.pose.theta).perp()
    moved = b.world_footprint

    def clearance(t: float) -> float:
        return polygons_clearance(a.world_footprint, moved.translated(u * t))

    hi = thr + 2 * (a.rect.half_extents[0] + b.rect.half_extents[0])
    lo = 0.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if clearance(mid) >= thr + SEPARATION_SLACK:
            hi = mid
        else:
            lo = mid
    graph = support_graph(scene)
    group = _carried(scene, neighbor_id, graph)
    new, cause = _translate_group(scene, group, u * hi, graph, _below(graph, neighbor_id) | {obj_id})
    if new is None:
        return _fail(scene, "collision" if cause == "edge_unreachable" else cause)
    return _ok(new)
