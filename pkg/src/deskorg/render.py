"""Top-down SVG drawings of desk scenes."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .geometry import Polygon, Pose2, heading
from .sim.world import Scene

SCALE = 800.0  # pixels per meter
MARGIN = 20.0

COLORS = {
    "pen": "#1f77b4",
    "eraser": "#e377c2",
    "lead_case": "#17becf",
    "straight_ruler": "#ff7f0e",
    "triangle_ruler_30": "#d62728",
    "triangle_ruler_45": "#9467bd",
    "paper": "#f5f5dc",
    "book": "#8c564b",
    "pen_holder": "#7f7f7f",
}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, scene: Scene):
        x0, y0, x1, y1 = scene.table.support_polygon.bounds()
        self.x0, self.y1 = x0, y1
        self.width = (x1 - x0) * SCALE + 2 * MARGIN
        self.height = (y1 - y0) * SCALE + 2 * MARGIN

    def xy(self, p) -> tuple[float, float]:
        return (p[0] - self.x0) * SCALE + MARGIN, (self.y1 - p[1]) * SCALE + MARGIN

    def points(self, poly: Polygon) -> str:
        return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (self.xy(v) for v in poly.vertices))


def _poly(parent, canvas: _Canvas, poly: Polygon, cls: str, fill: str, **attrs):
    el = ET.SubElement(parent, "polygon", {"class": cls, "points": canvas.points(poly), "fill": fill,
                                           "stroke": "#333333", "stroke-width": "1"})
    for k, v in attrs.items():
        el.set(k.replace("_", "-"), v)
    return el


def _zone_marker(parent, canvas: _Canvas, pose: Pose2, cls: str, label: str):
    g = ET.SubElement(parent, "g", {"class": cls})
    cx, cy = canvas.xy(pose.position)
    ET.SubElement(g, "circle", {"cx": _fmt(cx), "cy": _fmt(cy), "r": "6", "fill": "none", "stroke": "#2ca02c",
                                "stroke-width": "2"})
    tip = canvas.xy(pose.position + heading(pose.theta) * 0.05)
    ET.SubElement(g, "line", {"x1": _fmt(cx), "y1": _fmt(cy), "x2": _fmt(tip[0]), "y2": _fmt(tip[1]),
                              "stroke": "#2ca02c", "stroke-width": "2"})
    t = ET.SubElement(g, "text", {"x": _fmt(cx + 8), "y": _fmt(cy - 8), "font-size": "11", "fill": "#2ca02c"})
    t.text = label


def render_svg(scene: Scene, title: str | None = None) -> str:
    """Table, dominant edge, fixtures and object footprints coloured by category."""
    c = _Canvas(scene)
    svg = ET.Element("svg", {"xmlns": "http://www.w3.org/2000/svg", "width": _fmt(c.width),
                             "height": _fmt(c.height), "viewBox": f"0 0 {_fmt(c.width)} {_fmt(c.height)}"})
    if title is None:
        title = scene.name or "scene"
    ET.SubElement(svg, "title").text = title
    _poly(svg, c, scene.table.support_polygon, "table", "#deb887")
    e = scene.table.dominant_edge
    (x1, y1), (x2, y2) = c.xy(e.p0), c.xy(e.p1)
    ET.SubElement(svg, "line", {"class": "dominant-edge", "x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2),
                                "y2": _fmt(y2), "stroke": "#d62728", "stroke-width": "4"})
    _poly(svg, c, scene.pen_holder_region, "pen-holder", COLORS["pen_holder"], fill_opacity="0.4")
    _zone_marker(svg, c, scene.stack_zone, "stack-zone", "stack")
    _zone_marker(svg, c, scene.paper_zone, "paper-zone", "paper")
    layer = ET.SubElement(svg, "g", {"class": "objects"})
    for o in sorted(scene.objects, key=lambda o: (o.z, o.id)):
        _poly(layer, c, o.world_footprint, f"object {o.category}", COLORS[o.category], data_id=o.id,
              fill_opacity="0.9")
    stored = ET.SubElement(svg, "g", {"class": "stored"})
    for o in scene.stored:
        _poly(stored, c, o.world_footprint, f"stored {o.category}", COLORS[o.category], data_id=o.id,
              fill_opacity="0.6")
    if scene.in_hand is not None:
        t = ET.SubElement(svg, "text", {"class": "in-hand", "x": _fmt(MARGIN), "y": _fmt(MARGIN - 5),
                                        "font-size": "12"})
        t.text = f"holding {scene.in_hand.id}"
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"
