"""Desk-organization task planner: primitive assignment, ordering and execution."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import DeskOrgError, EdgeUnreachable, InfeasibleThickness, NoOverhang, NoSupport, UnknownCategory
from .geometry import angle_mod_pi, bbox_gap, axis_angle_diff, point_in_polygon, polygons_clearance
from .primitives import plan_contact_grasp, plan_pry_grasp, plan_push_grasp
from .sim.actions import (
    ActionResult,
    SimConfig,
    apply_grasp,
    apply_place,
    apply_push,
    apply_reorient,
    apply_separation_push,
)
from .sim.world import DEFORMABLE, DESKTOP, FIXTURES, RULERS, SMALL, Scene, support_depth, support_graph

KINDS = ("contact_grasp", "push_grasp", "pry_grasp", "reorient", "separation_push", "place")
GRASPS = ("contact_grasp", "push_grasp", "pry_grasp")


@dataclass(frozen=True)
class PrimitiveAction:
    kind: str
    object_id: str
    payload: Any = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "place":
            return f"place {self.object_id} -> {self.payload}"
        if self.kind == "separation_push":
            return f"separation_push {self.payload} away from {self.object_id}"
        if self.kind == "reorient":
            return f"reorient {self.object_id} to {math.degrees(self.payload):.1f} deg"
        return f"{self.kind} {self.object_id}"


@dataclass(frozen=True)
class Plan:
    actions: tuple[PrimitiveAction, ...] = ()

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def kinds(self) -> list[str]:
        return [a.kind for a in self.actions]


# -- assignment and ordering -----------------------------------------------------

def assign_primitives(scene: Scene) -> dict[str, str]:
    out = {}
    for o in scene.objects:
        if o.category in FIXTURES:
            continue
        if o.category in SMALL or o.category == "paper":
            out[o.id] = "contact_grasp"
        elif o.category in RULERS:
            out[o.id] = "push_grasp"
        elif o.category == "book":
            out[o.id] = "pry_grasp"
        else:
            raise UnknownCategory(f"no primitive for {o.category!r}")
    return out


def order_objects(scene: Scene) -> list[str]:
    """Small objects first (topmost first), then rulers and deformables.

    Rulers resting on a book go before the deformables; otherwise paper and
    books go first. Books are taken from the top of a stack down. Finally an
    object is always moved before the object supporting it, which puts a
    ruler lying on paper ahead of that paper.
    """
    graph = support_graph(scene)
    kinds = assign_primitives(scene)
    depth = {k: support_depth(graph, k) for k in kinds}
    cat = {o.id: o.category for o in scene.objects}

    def topmost(ids):
        return sorted(ids, key=lambda i: (-depth[i], i))

    smalls = topmost(i for i in kinds if cat[i] in SMALL)
    rulers = topmost(i for i in kinds if cat[i] in RULERS)
    papers = topmost(i for i in kinds if cat[i] == "paper")
    books = topmost(i for i in kinds if cat[i] == "book")
    ruler_on_book = any(graph[r] != DESKTOP and cat[graph[r]] == "book" for r in rulers)
    base = smalls + (rulers + papers + books if ruler_on_book else papers + books + rulers)

    out: list[str] = []
    done: set[str] = set()

    def add(i):
        if i in done:
            return
        done.add(i)
        for j in base:
            if graph.get(j) == i:
                add(j)
        out.append(i)

    for i in base:
        add(i)
    return out


def aligned_yaw(theta: float, reference: float) -> float:
    """Nearest yaw to ``theta`` whose long (body x) axis is parallel to ``reference``."""
    off = angle_mod_pi(theta - reference + math.pi / 2) - math.pi / 2
    return theta - off


def place_target(category: str) -> str:
    if category == "paper":
        return "aligned_pose"
    if category == "book":
        return "stack_zone"
    return "pen_holder"


def _neighbors(scene: Scene, obj_id: str, threshold: float) -> list[str]:
    graph = support_graph(scene)
    me = scene.get(obj_id)
    out = []
    for o in scene.objects:
        if o.id == obj_id or graph[o.id] != graph[obj_id] or o.category in FIXTURES:
            continue
        if bbox_gap(me.world_footprint, o.world_footprint) >= threshold:
            continue
        if polygons_clearance(me.world_footprint, o.world_footprint) < threshold:
            out.append(o.id)
    return sorted(out)


def _grasp_payload(kind: str, scene: Scene, obj_id: str, cfg: SimConfig):
    obj = scene.get(obj_id)
    pc = cfg.primitives
    if kind == "contact_grasp":
        return plan_contact_grasp(obj, scene, pc, "contact")
    if kind == "push_grasp":
        return plan_push_grasp(obj, scene, pc)
    return plan_pry_grasp(obj, scene.stack_zone, pc, cfg.tables, scene_key=scene.fingerprint())


# -- plan construction -------------------------------------------------------------

def build_plan(scene: Scene, cfg: SimConfig = SimConfig()) -> Plan:
    """Plan every object in order against a nominal (always succeeding) simulation."""
    kinds = assign_primitives(scene)
    dominant = scene.table.dominant_edge.angle
    actions: list[PrimitiveAction] = []
    live = scene
    for oid in order_objects(scene):
        for nb in _neighbors(live, oid, cfg.separation_threshold):
            actions.append(PrimitiveAction("separation_push", oid, nb))
            res = apply_separation_push(live, oid, nb, cfg)
            live = res.scene_after
        kind = kinds[oid]
        payload = _grasp_payload(kind, live, oid, cfg)
        actions.append(PrimitiveAction(kind, oid, payload))
        live = _nominal_grasp(live, oid, kind, payload, cfg)
        obj = live.in_hand
        if obj.category in DEFORMABLE:
            yaw = aligned_yaw(obj.pose.theta, dominant)
            actions.append(PrimitiveAction("reorient", oid, yaw))
            live = apply_reorient(live, yaw).scene_after
        target = place_target(obj.category)
        actions.append(PrimitiveAction("place", oid, target))
        res = apply_place(live, target, cfg)
        live = res.scene_after if res.ok else replace(live, in_hand=None, stored=live.stored + (obj,))
    return Plan(tuple(actions))


def _nominal_grasp(scene: Scene, oid: str, kind: str, payload, cfg: SimConfig) -> Scene:
    if kind == "push_grasp":
        res = apply_push(scene, oid, payload, cfg)
        if res.ok:
            scene = res.scene_after
    return replace(scene.without(oid), in_hand=scene.get(oid), hand_yaw_error=0.0)


# -- execution -----------------------------------------------------------------------

@dataclass
class TaskReport:
    scenario: str
    mode: str
    seed: int
    outcome: str = "success"
    completed_actions: int = 0
    total_actions: int = 0
    failure: dict | None = None
    objects: dict = field(default_factory=dict)
    actions: list = field(default_factory=list)
    final_fingerprint: str = ""
    frames: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "mode": self.mode,
            "seed": self.seed,
            "outcome": self.outcome,
            "completed_actions": self.completed_actions,
            "total_actions": self.total_actions,
            "failure": self.failure,
            "objects": self.objects,
            "actions": self.actions,
            "final_fingerprint": self.final_fingerprint,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @property
    def cause(self) -> str:
        return "none" if self.failure is None else self.failure["cause"]


_ERROR_CAUSES = (
    ((EdgeUnreachable, NoSupport, NoOverhang), "edge_unreachable"),
    ((InfeasibleThickness,), "infeasible"),
)


def _cause_for(exc: DeskOrgError) -> str:
    for types, cause in _ERROR_CAUSES:
        if isinstance(exc, types):
            return cause
    raise exc


def _run_action(scene: Scene, action: PrimitiveAction, mode: str, cfg: SimConfig, rng) -> ActionResult:
    """Replan the payload against the live scene, then execute."""
    oid = action.object_id
    if action.kind == "separation_push":
        return apply_separation_push(scene, oid, action.payload, cfg)
    if action.kind == "reorient":
        return apply_reorient(scene, aligned_yaw(scene.in_hand.pose.theta, scene.table.dominant_edge.angle))
    if action.kind == "place":
        return apply_place(scene, action.payload, cfg)
    payload = _grasp_payload(action.kind, scene, oid, cfg)
    if action.kind == "push_grasp":
        res = apply_push(scene, oid, payload, cfg)
        if not res.ok:
            return res
        scene = res.scene_after
    return apply_grasp(scene, oid, payload, mode, cfg, rng)


def execute(scene: Scene, plan: Plan, mode: str = "deterministic", seed: int = 0,
            cfg: SimConfig = SimConfig(), record_frames: bool = False) -> TaskReport:
    rng = np.random.default_rng(seed)
    report = TaskReport(scene.name, mode, int(seed), total_actions=len(plan))
    kinds = {a.object_id: a.kind for a in plan if a.kind in GRASPS}
    for oid, kind in kinds.items():
        report.objects[oid] = {"primitive": kind, "status": "pending"}
    if record_frames:
        report.frames.append(scene)
    live = scene
    for i, action in enumerate(plan):
        try:
            res = _run_action(live, action, mode, cfg, rng)
        except DeskOrgError as exc:
            res = ActionResult("failure", _cause_for(exc), live)
        entry = {"index": i, "kind": action.kind, "object_id": action.object_id,
                 "outcome": res.outcome, "cause": res.cause}
        if action.kind in ("place", "separation_push"):
            entry["target"] = action.payload
        if res.probability is not None:
            entry["probability"] = res.probability
        report.actions.append(entry)
        live = res.scene_after
        if record_frames:
            report.frames.append(live)
        if not res.ok:
            report.outcome = "failure"
            report.failure = {"action_index": i, "kind": action.kind, "object_id": action.object_id,
                              "cause": res.cause}
            if action.object_id in report.objects:
                report.objects[action.object_id]["status"] = "failed"
            break
        report.completed_actions += 1
        if action.kind == "place":
            report.objects[action.object_id]["status"] = "placed"
            report.objects[action.object_id]["target"] = action.payload
    report.final_fingerprint = live.fingerprint()
    report.final_scene = live
    return report


def organize(scene: Scene, mode: str = "deterministic", seed: int = 0, cfg: SimConfig = SimConfig(),
             record_frames: bool = False) -> TaskReport:
    return execute(scene, build_plan(scene, cfg), mode, seed, cfg, record_frames)


def targets_satisfied(scene: Scene, tol: float = 1e-6) -> bool:
    """Post-hoc geometric check that every object sits in its target region."""
    if scene.in_hand is not None:
        return False
    for o in scene.stored:
        if not all(point_in_polygon(v, scene.pen_holder_region) for v in o.world_footprint.vertices):
            return False
    dominant = scene.table.dominant_edge.angle
    for o in scene.objects:
        if o.category == "paper":
            zone = scene.paper_zone
        elif o.category == "book":
            zone = scene.stack_zone
        else:
            return False
        if (o.rect.center - zone.position).norm() > tol or axis_angle_diff(o.pose.theta, dominant) > tol:
            return False
    return True
