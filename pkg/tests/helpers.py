import math

from deskorg.geometry import Pose2, rect_polygon
from deskorg.sim.scenarios import PAPER_ZONE, STACK_ZONE, default_table, pen_holder_region
from deskorg.sim.world import DESKTOP, Material, ObjectState, Scene


def make_scene(objects=(), name="test"):
    return Scene(default_table(), tuple(objects), pen_holder_region(), STACK_ZONE, PAPER_ZONE, name=name)


def rect_obj(oid, category, length, width, x, y, theta=0.0, height=0.003, z=0.0, supported_by=DESKTOP,
             material=Material()):
    return ObjectState(oid, category, rect_polygon(length, width), Pose2((x, y), theta), height,
                       material=material, supported_by=supported_by, z=z)


def book(oid, x, y, theta=0.0, thickness=0.012, length=0.24, width=0.17, **kw):
    return rect_obj(oid, "book", length, width, x, y, theta, height=thickness,
                    material=Material("book", thickness=thickness, spine_gap=0.005), **kw)


def paper(oid, x, y, theta=0.0, gsm=70.0, **kw):
    return rect_obj(oid, "paper", 0.297, 0.21, x, y, theta, height=0.0001,
                    material=Material("paper", gsm=gsm), **kw)


def ruler(oid, x, y, theta=-math.pi / 2, **kw):
    return rect_obj(oid, "straight_ruler", 0.15, 0.03, x, y, theta, height=0.002, **kw)
