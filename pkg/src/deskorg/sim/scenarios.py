"""Seeded generation of the Cxyz desk scenarios and the shipped golden catalog.

``x`` is the number of object categories, ``y`` the combination index within
that count and ``z`` the layout instance (1 to 3). Placement is rejection
sampling: every desktop-level footprint keeps a clearance margin from the
others and from the fixtures, and every ruler must be pushable to its edge
with the rest of the scene still in place.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ..errors import EdgeUnreachable, UnknownSpec
from ..geometry import (
    Point2,
    Polygon,
    Pose2,
    bbox_gap,
    intersection_area,
    point_in_polygon,
    polygons_clearance,
    rect_polygon,
)
from ..perception import TableModel
from ..primitives import plan_push_grasp
from .world import DESKTOP, Material, ObjectState, Scene, scene_from_dict, validate_scene

TABLE_LENGTH, TABLE_DEPTH = 1.2, 0.7
PEN_HOLDER_CENTER, PEN_HOLDER_SIZE = (0.43, 0.22), (0.160, 0.108)
STACK_ZONE = Pose2((-0.38, 0.20), 0.0)
PAPER_ZONE = Pose2((0.02, 0.18), 0.0)
CLEARANCE = 0.03
TABLE_MARGIN = 0.02
ADJACENT_GAP = 0.003

COMBINATIONS: dict[tuple[int, int], tuple[str, ...]] = {
    (2, 1): ("pen", "eraser"),
    (2, 2): ("eraser", "book"),
    (2, 3): ("lead_case", "paper"),
    (3, 1): ("ruler", "paper", "eraser"),
    (3, 2): ("ruler", "book", "pen"),
    (3, 3): ("pen", "lead_case", "book"),
    (3, 4): ("eraser", "paper", "book"),
    (4, 1): ("ruler", "paper", "pen", "eraser"),
    (4, 2): ("ruler", "book", "lead_case", "eraser"),
    (4, 3): ("pen", "eraser", "paper", "book"),
    (5, 1): ("pen", "eraser", "lead_case", "ruler", "book"),
    (5, 2): ("pen", "eraser", "ruler", "paper", "book"),
}

# (child, parent) stacking relations per layout, by category; "ruler" is the
# scene's ruler whatever its type
RELATIONS: dict[str, tuple[tuple[str, str], ...]] = {
    "C311": (("ruler", "paper"),),
    "C321": (("ruler", "book"),),
    "C322": (("ruler", "book"),),
    "C342": (("eraser", "paper"),),
    "C411": (("ruler", "paper"),),
    "C421": (("ruler", "book"),),
    "C431": (("pen", "book"),),
    "C511": (("ruler", "book"),),
    "C513": (("lead_case", "book"),),
    "C521": (("ruler", "book"),),
    "C523": (("eraser", "paper"),),
}
# C222 also carries a second book stacked on the first (see _attempt)
# layouts with a second object of a category placed right next to the first
ADJACENT: dict[str, str] = {"C213": "eraser"}
HAZARDS = frozenset({"C311", "C411"})

_SPEC_RE = re.compile(r"^C([2-5])(\d)([1-3])$")


@dataclass(frozen=True)
class CxyzSpec:
    x: int
    y: int
    z: int

    @classmethod
    def parse(cls, text: str) -> "CxyzSpec":
        m = _SPEC_RE.match(text.strip().upper()) if isinstance(text, str) else None
        if not m:
            raise UnknownSpec(f"{text!r} is not a Cxyz scenario label")
        spec = cls(*(int(g) for g in m.groups()))
        if (spec.x, spec.y) not in COMBINATIONS:
            raise UnknownSpec(f"no combination {spec.y} with {spec.x} categories")
        return spec

    def __str__(self) -> str:
        return f"C{self.x}{self.y}{self.z}"

    @property
    def categories(self) -> tuple[str, ...]:
        return COMBINATIONS[(self.x, self.y)]

    @property
    def ruler_kind(self) -> str | None:
        if "ruler" not in self.categories:
            return None
        if self.x == 5:
            return "triangle_ruler_45" if self.z == 2 else "triangle_ruler_30"
        if (self.x, self.y) == (4, 2) and self.z > 1:
            return "triangle_ruler_30" if self.z == 2 else "triangle_ruler_45"
        return "straight_ruler"

    @property
    def hazardous(self) -> bool:
        return str(self) in HAZARDS


def catalog() -> list[str]:
    return [f"C{x}{y}{z}" for (x, y) in sorted(COMBINATIONS) for z in (1, 2, 3)]


@lru_cache(maxsize=1)
def materials() -> dict:
    return json.loads(resources.files("deskorg").joinpath("data/materials.json").read_text())


def default_table() -> TableModel:
    return TableModel.from_polygon(rect_polygon(TABLE_LENGTH, TABLE_DEPTH))


def pen_holder_region() -> Polygon:
    return rect_polygon(*PEN_HOLDER_SIZE).translated(PEN_HOLDER_CENTER)


def _zones() -> list[Polygon]:
    m = materials()
    paper = rect_polygon(m["paper"]["length"][1], m["paper"]["width"][1]).translated(PAPER_ZONE.position)
    book = rect_polygon(m["book"]["length"][1], m["book"]["width"][1]).translated(STACK_ZONE.position)
    return [pen_holder_region(), paper, book]


def _uniform(rng: np.random.Generator, lo_hi) -> float:
    lo, hi = lo_hi
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def _make_body(rng: np.random.Generator, category: str) -> tuple[Polygon, float, float, Material]:
    """Body-frame footprint (long side along +x, bbox centred), height, mass, material."""
    m = materials()[category]
    mass = _uniform(rng, m["mass"])
    if category.startswith("triangle_ruler"):
        leg = m["leg"][0]
        ang = math.radians(30 if category.endswith("30") else 45)
        other = leg * math.tan(ang)
        foot = Polygon(((-leg / 2, -other / 2), (leg / 2, -other / 2), (-leg / 2, other / 2)))
        return foot, _uniform(rng, m["height"]), mass, Material()
    foot = rect_polygon(_uniform(rng, m["length"]), _uniform(rng, m["width"]))
    if category == "paper":
        return foot, m["height"][0], mass, Material("paper", gsm=round(_uniform(rng, m["gsm"]), 1))
    if category == "book":
        th = float(rng.choice(m["thickness"]))
        gap = round(_uniform(rng, m["spine_gap"]), 4)
        return foot, th, mass, Material("book", thickness=th, spine_gap=gap)
    return foot, _uniform(rng, m["height"]), mass, Material()


def _inside_table(poly: Polygon) -> bool:
    hx, hy = TABLE_LENGTH / 2 - TABLE_MARGIN, TABLE_DEPTH / 2 - TABLE_MARGIN
    return all(abs(v.x) <= hx and abs(v.y) <= hy for v in poly.vertices)


def _far_from(poly: Polygon, others, margin: float) -> bool:
    for o in others:
        if bbox_gap(poly, o) >= margin:
            continue
        if intersection_area(poly, o) > 0 or polygons_clearance(poly, o) < margin:
            return False
    return True


class _Retry(Exception):
    pass


def generate_scenario(spec, seed: int = 0) -> Scene:
    """Deterministic scene for a Cxyz label and seed."""
    spec = spec if isinstance(spec, CxyzSpec) else CxyzSpec.parse(spec)
    rng = np.random.default_rng([int(seed), spec.x, spec.y, spec.z])
    for _ in range(500):
        try:
            scene = _attempt(spec, seed, rng)
        except _Retry:
            continue
        validate_scene(scene)
        return scene
    raise RuntimeError(f"could not lay out {spec} with seed {seed}")


def _attempt(spec: CxyzSpec, seed: int, rng: np.random.Generator) -> Scene:
    label = str(spec)
    cats = [spec.ruler_kind if c == "ruler" else c for c in spec.categories]
    relations = {child: parent for child, parent in RELATIONS.get(label, ())}
    items = [(c, c) for c in cats]  # (category, role)
    if label == "C222":
        items.append(("book", "top_book"))
    if label in ADJACENT:
        items.append((ADJACENT[label], "adjacent"))

    def role_key(role):
        return "ruler" if role.startswith(("straight", "triangle")) else role

    # supports first, then desktop objects by size, then stacked children
    def order(item):
        cat, role = item
        stacked = role == "top_book" or role_key(role) in relations or role == "adjacent"
        size = {"paper": 0, "book": 1}.get(cat, 3 if cat in ("pen", "eraser", "lead_case") else 2)
        return (stacked, size)

    counts: dict[str, int] = {}
    placed: list[ObjectState] = []
    by_cat: dict[str, ObjectState] = {}
    zones = _zones()
    for cat, role in sorted(items, key=order):
        counts[cat] = counts.get(cat, 0) + 1
        oid = f"{cat}_{counts[cat]}"
        foot, height, mass, mat = _make_body(rng, cat)
        parent_cat = "book" if role == "top_book" else relations.get(role_key(role))
        if parent_cat is not None:
            obj = _place_on(rng, oid, cat, foot, height, mass, mat, by_cat[parent_cat], placed)
        elif role == "adjacent":
            obj = _place_adjacent(rng, oid, cat, foot, height, mass, mat, by_cat[cat], placed, zones)
        else:
            obj = _place_desktop(rng, oid, cat, foot, height, mass, mat, placed, zones)
        placed.append(obj)
        by_cat.setdefault(cat, obj)
        if role == "top_book":
            by_cat["book"] = obj

    scene = Scene(
        table=default_table(),
        objects=tuple(sorted(placed, key=lambda o: o.id)),
        pen_holder_region=pen_holder_region(),
        stack_zone=STACK_ZONE,
        paper_zone=PAPER_ZONE,
        rng_seed=int(seed),
        name=label,
    )
    _check_pushes(scene)
    return scene


def _sample_desktop_pose(rng, cat: str) -> Pose2:
    if cat.endswith("ruler") or cat.startswith("triangle"):
        # in the front band, long axis within 35 degrees of the front-edge normal
        x, y = rng.uniform(-0.42, 0.42), rng.uniform(-0.27, -0.19)
        theta = -math.pi / 2 + rng.uniform(-math.radians(35), math.radians(35))
    elif cat in ("paper", "book"):
        x, y = rng.uniform(-0.45, 0.45), rng.uniform(-0.22, 0.0)
        theta = rng.uniform(math.radians(5), math.radians(20)) * rng.choice([-1, 1])
    else:
        x, y = rng.uniform(-0.52, 0.52), rng.uniform(-0.3, 0.12)
        theta = rng.uniform(-math.pi / 2, math.pi / 2)
    return Pose2((float(x), float(y)), float(theta))


def _desktop_layer(placed):
    return [o.world_footprint for o in placed if o.supported_by == DESKTOP]


def _place_desktop(rng, oid, cat, foot, height, mass, mat, placed, zones) -> ObjectState:
    for _ in range(400):
        obj = ObjectState(oid, cat, foot, _sample_desktop_pose(rng, cat), height, mass, mat)
        wf = obj.world_footprint
        if not _inside_table(wf) or not _far_from(wf, zones, CLEARANCE):
            continue
        if _far_from(wf, [o.world_footprint for o in placed], CLEARANCE):
            return obj
    raise _Retry


def _place_adjacent(rng, oid, cat, foot, height, mass, mat, twin, placed, zones) -> ObjectState:
    u = Point2(math.cos(twin.pose.theta), math.sin(twin.pose.theta)).perp()
    sign = rng.choice([-1, 1])
    w_twin = twin.rect.half_extents[1]
    ys = [v.y for v in foot.vertices]
    offset = w_twin + (max(ys) - min(ys)) / 2 + ADJACENT_GAP
    pose = Pose2(twin.position + u * (sign * offset), twin.pose.theta)
    obj = ObjectState(oid, cat, foot, pose, height, mass, mat)
    wf = obj.world_footprint
    others = [o.world_footprint for o in placed if o.id != twin.id]
    # room for the separation push as well
    if not _inside_table(wf) or not _far_from(wf, zones, 2 * CLEARANCE) or not _far_from(wf, others, 2 * CLEARANCE):
        raise _Retry
    return obj


def _place_on(rng, oid, cat, foot, height, mass, mat, parent, placed) -> ObjectState:
    prect = parent.rect
    u, v = prect.axes
    a, b = prect.half_extents
    for _ in range(400):
        if cat.endswith("ruler") or cat.startswith("triangle"):
            if parent.category == "book":
                # across the book, nearer one long edge so the target edge is unambiguous
                c = prect.center + u * rng.uniform(-0.3 * a, 0.3 * a) + v * (rng.choice([-1, 1]) * rng.uniform(0.15, 0.3) * b)
                theta = prect.angle + math.pi / 2 + rng.uniform(-0.25, 0.25)
            else:
                c = prect.center + u * rng.uniform(-0.3 * a, 0.3 * a) + v * rng.uniform(-0.3 * b, 0.3 * b)
                theta = -math.pi / 2 + rng.uniform(-math.radians(35), math.radians(35))
        elif cat == "book":
            c = prect.center + u * rng.uniform(-0.3 * a, 0.3 * a) + v * rng.uniform(-0.3 * b, 0.3 * b)
            theta = prect.angle + rng.uniform(-0.3, 0.3)
        else:
            c = prect.center + u * rng.uniform(-0.6 * a, 0.6 * a) + v * rng.uniform(-0.6 * b, 0.6 * b)
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
        obj = ObjectState(oid, cat, foot, Pose2(c, float(theta)), height, mass, mat, parent.id, parent.top)
        wf = obj.world_footprint
        if not _inside_table(wf):
            continue
        if cat in ("pen", "eraser", "lead_case"):
            # small objects sit wholly on their support
            if not all(point_in_polygon(v, parent.world_footprint) for v in wf.vertices):
                continue
        siblings = [o.world_footprint for o in placed if o.supported_by == parent.id]
        lower = [o.world_footprint for o in placed if o.id != parent.id and o.supported_by == DESKTOP
                 and o.id != parent.supported_by]
        if _far_from(wf, siblings, CLEARANCE) and _far_from(wf, lower, CLEARANCE):
            return obj
    raise _Retry


def _check_pushes(scene: Scene) -> None:
    """Every ruler must be pushable to its edge with all other objects present."""
    from .actions import apply_push

    for o in scene.objects:
        if o.category not in ("straight_ruler", "triangle_ruler_30", "triangle_ruler_45"):
            continue
        try:
            plan = plan_push_grasp(o, scene)
        except EdgeUnreachable:
            raise _Retry from None
        if not apply_push(scene, o.id, plan).ok:
            raise _Retry


# -- golden catalog --------------------------------------------------------------

def golden_path(label: str):
    return resources.files("deskorg").joinpath(f"data/scenarios/{label}.json")


def load_golden(label) -> Scene:
    label = str(label if isinstance(label, CxyzSpec) else CxyzSpec.parse(label))
    return scene_from_dict(json.loads(golden_path(label).read_text()))
