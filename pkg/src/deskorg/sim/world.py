"""Scene and object value types, the support graph, and scene files."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path

import jsonschema

from ..errors import CyclicSupport, InvalidScene
from ..geometry import Point2, Polygon, Pose2, intersection_area, min_area_rect, point_in_polygon
from ..perception import PlaneModel, TableModel

DESKTOP = "DESKTOP"

SMALL = frozenset({"pen", "eraser", "lead_case"})
RULERS = frozenset({"straight_ruler", "triangle_ruler_30", "triangle_ruler_45"})
TRIANGLE_RULERS = frozenset({"triangle_ruler_30", "triangle_ruler_45"})
DEFORMABLE = frozenset({"paper", "book"})
FIXTURES = frozenset({"pen_holder"})
CATEGORIES = SMALL | RULERS | DEFORMABLE | FIXTURES

OVERLAP_AREA_TOL = 1e-8
Z_TOL = 1e-9


@dataclass(frozen=True)
class Material:
    kind: str = "rigid"  # rigid | paper | book
    gsm: float | None = None
    thickness: float | None = None
    spine_gap: float | None = None

    def __post_init__(self):
        if self.kind not in ("rigid", "paper", "book"):
            raise ValueError(f"unknown material kind {self.kind!r}")
        if self.kind == "paper" and not (self.gsm and self.gsm > 0):
            raise ValueError("paper needs a positive gsm")
        if self.kind == "book" and not (self.thickness and self.thickness > 0):
            raise ValueError("book needs a positive thickness")


@dataclass(frozen=True)
class ObjectState:
    id: str
    category: str
    footprint: Polygon
    pose: Pose2
    height: float
    mass: float = 0.0
    material: Material = Material()
    supported_by: str = DESKTOP
    z: float = 0.0  # bottom elevation above the table plane

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise InvalidScene(f"unknown category {self.category!r}")
        if not self.height > 0:
            raise InvalidScene(f"{self.id}: height must be positive")

    @cached_property
    def world_footprint(self) -> Polygon:
        return self.footprint.transformed(self.pose)

    @property
    def top(self) -> float:
        return self.z + self.height

    @property
    def position(self) -> Point2:
        return self.pose.position

    @cached_property
    def rect(self):
        return min_area_rect(self.world_footprint)

    def moved(self, pose: Pose2 | None = None, z: float | None = None, supported_by: str | None = None) -> "ObjectState":
        return replace(
            self,
            pose=self.pose if pose is None else pose,
            z=self.z if z is None else z,
            supported_by=self.supported_by if supported_by is None else supported_by,
        )


@dataclass(frozen=True)
class Scene:
    table: TableModel
    objects: tuple[ObjectState, ...]
    pen_holder_region: Polygon
    stack_zone: Pose2
    paper_zone: Pose2
    rng_seed: int = 0
    name: str = ""
    in_hand: ObjectState | None = None
    hand_yaw_error: float = 0.0
    stored: tuple[ObjectState, ...] = field(default=())

    def get(self, obj_id: str) -> ObjectState:
        for o in self.objects:
            if o.id == obj_id:
                return o
        raise KeyError(obj_id)

    def has(self, obj_id: str) -> bool:
        return any(o.id == obj_id for o in self.objects)

    def ids(self) -> list[str]:
        return [o.id for o in self.objects]

    def with_object(self, obj: ObjectState) -> "Scene":
        objs = tuple(obj if o.id == obj.id else o for o in self.objects)
        return replace(self, objects=objs)

    def without(self, obj_id: str) -> "Scene":
        return replace(self, objects=tuple(o for o in self.objects if o.id != obj_id))

    def all_object_ids(self) -> set[str]:
        ids = {o.id for o in self.objects} | {o.id for o in self.stored}
        if self.in_hand is not None:
            ids.add(self.in_hand.id)
        return ids

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(scene_to_dict(self), sort_keys=True).encode()).hexdigest()


# -- support relations ---------------------------------------------------------

def supporter_of(scene: Scene, obj: ObjectState, exclude: frozenset = frozenset()) -> str:
    """Topmost object under ``obj``'s center whose top is not above its bottom."""
    best, best_top = DESKTOP, -math.inf
    for o in scene.objects:
        if o.id == obj.id or o.id in exclude:
            continue
        if o.top > obj.z + Z_TOL:
            continue
        if not point_in_polygon(obj.position, o.world_footprint):
            continue
        if o.top > best_top or (o.top == best_top and o.id < best):
            best, best_top = o.id, o.top
    return best


def support_graph(scene: Scene) -> dict[str, str]:
    """Map every object id to the id of its supporter (or DESKTOP)."""
    graph = {o.id: supporter_of(scene, o) for o in scene.objects}
    _check_acyclic(graph)
    return graph


def _check_acyclic(graph: dict[str, str]) -> None:
    for start in graph:
        seen = {start}
        cur = graph[start]
        while cur != DESKTOP:
            if cur in seen:
                raise CyclicSupport(f"support cycle through {cur!r}")
            seen.add(cur)
            cur = graph.get(cur, DESKTOP)


def support_depth(graph: dict[str, str], obj_id: str) -> int:
    depth, cur = 0, graph[obj_id]
    while cur != DESKTOP:
        depth += 1
        cur = graph[cur]
    return depth


def resting_on(scene: Scene, obj_id: str) -> list[str]:
    graph = support_graph(scene)
    return sorted(k for k, v in graph.items() if v == obj_id)


def validate_scene(scene: Scene) -> dict[str, str]:
    """Check scene invariants; return the support graph."""
    ids = [o.id for o in scene.objects]
    if len(set(ids)) != len(ids):
        raise InvalidScene("duplicate object ids")
    declared = {o.id: o.supported_by for o in scene.objects}
    for k, v in declared.items():
        if v != DESKTOP and v not in declared:
            raise InvalidScene(f"{k}: supporter {v!r} is not in the scene")
    _check_acyclic(declared)
    graph = support_graph(scene)
    for k, v in graph.items():
        if declared[k] != v:
            raise InvalidScene(f"{k}: declared supporter {declared[k]!r} but geometry says {v!r}")
        expected_z = 0.0 if v == DESKTOP else scene.get(v).top
        if abs(scene.get(k).z - expected_z) > 1e-6:
            raise InvalidScene(f"{k}: z={scene.get(k).z} does not rest on {v} (top {expected_z})")
    objs = scene.objects
    for i in range(len(objs)):
        for j in range(i + 1, len(objs)):
            a, b = objs[i], objs[j]
            if graph[a.id] != graph[b.id]:
                continue
            if intersection_area(a.world_footprint, b.world_footprint) >= OVERLAP_AREA_TOL:
                raise InvalidScene(f"{a.id} and {b.id} overlap on the same support layer")
    return graph


# -- serialization ---------------------------------------------------------------

def _poly(p: Polygon) -> list[list[float]]:
    return [[v.x, v.y] for v in p.vertices]


def _pose(p: Pose2) -> dict:
    return {"x": p.position.x, "y": p.position.y, "theta": p.theta}


def _seg(s) -> list[list[float]]:
    return [[s.p0.x, s.p0.y], [s.p1.x, s.p1.y]]


def object_to_dict(o: ObjectState) -> dict:
    mat = {"kind": o.material.kind}
    for k in ("gsm", "thickness", "spine_gap"):
        val = getattr(o.material, k)
        if val is not None:
            mat[k] = val
    return {
        "id": o.id,
        "category": o.category,
        "footprint": _poly(o.footprint),
        "pose": _pose(o.pose),
        "z": o.z,
        "height": o.height,
        "mass": o.mass,
        "material": mat,
        "supported_by": o.supported_by,
    }


def scene_to_dict(scene: Scene) -> dict:
    t = scene.table
    d = {
        "units": {"length": "m", "angle": "rad", "mass": "kg"},
        "name": scene.name,
        "rng_seed": scene.rng_seed,
        "table": {
            "plane": {"normal": list(t.plane.normal), "offset": t.plane.offset},
            "support_polygon": _poly(t.support_polygon),
            "edges": [_seg(e) for e in t.edges],
            "dominant_edge": _seg(t.dominant_edge),
        },
        "pen_holder_region": _poly(scene.pen_holder_region),
        "stack_zone": _pose(scene.stack_zone),
        "paper_zone": _pose(scene.paper_zone),
        "objects": [object_to_dict(o) for o in scene.objects],
    }
    if scene.in_hand is not None:
        d["in_hand"] = object_to_dict(scene.in_hand)
        d["hand_yaw_error"] = scene.hand_yaw_error
    if scene.stored:
        d["stored"] = [object_to_dict(o) for o in scene.stored]
    return d


def _load_schema() -> dict:
    return json.loads(resources.files("deskorg").joinpath("data/scene.schema.json").read_text())


def object_from_dict(d: dict) -> ObjectState:
    m = d.get("material", {"kind": "rigid"})
    return ObjectState(
        id=d["id"],
        category=d["category"],
        footprint=Polygon(tuple(map(tuple, d["footprint"]))),
        pose=Pose2((d["pose"]["x"], d["pose"]["y"]), d["pose"]["theta"]),
        height=d["height"],
        mass=d.get("mass", 0.0),
        material=Material(m["kind"], m.get("gsm"), m.get("thickness"), m.get("spine_gap")),
        supported_by=d.get("supported_by", DESKTOP),
        z=d.get("z", 0.0),
    )


def scene_from_dict(d: dict, validate: bool = True) -> Scene:
    from ..geometry import Segment

    if validate:
        try:
            jsonschema.validate(d, _load_schema())
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path)
            raise InvalidScene(f"schema violation at '{path}': {exc.message}") from None
    t = d["table"]
    plane = PlaneModel(tuple(t["plane"]["normal"]), t["plane"]["offset"])
    table = TableModel(
        plane,
        Polygon(tuple(map(tuple, t["support_polygon"]))),
        tuple(Segment(tuple(a), tuple(b)) for a, b in t["edges"]),
        Segment(tuple(t["dominant_edge"][0]), tuple(t["dominant_edge"][1])),
    )

    def pose(p):
        return Pose2((p["x"], p["y"]), p["theta"])

    scene = Scene(
        table=table,
        objects=tuple(object_from_dict(o) for o in d["objects"]),
        pen_holder_region=Polygon(tuple(map(tuple, d["pen_holder_region"]))),
        stack_zone=pose(d["stack_zone"]),
        paper_zone=pose(d["paper_zone"]),
        rng_seed=d.get("rng_seed", 0),
        name=d.get("name", ""),
        in_hand=object_from_dict(d["in_hand"]) if d.get("in_hand") else None,
        hand_yaw_error=d.get("hand_yaw_error", 0.0),
        stored=tuple(object_from_dict(o) for o in d.get("stored", [])),
    )
    if validate:
        validate_scene(scene)
    return scene


def load_scene(path) -> Scene:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidScene(f"{path}: not valid JSON ({exc})") from None
    return scene_from_dict(data)


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=1, sort_keys=True) + "\n")
