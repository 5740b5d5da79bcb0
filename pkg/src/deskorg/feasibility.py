"""Success-probability tables for the manipulation primitives.

Cells are piecewise constant over parameter bands. Each cell records where its
value came from: ``measured`` values are the experimentally reported rates,
``extrapolated`` cells copy the nearest measured band, and ``calibrated``
cells were tuned so the simulator reproduces reported aggregate rates.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

from .errors import OffsetOutOfRange

MEASURED = "measured"
EXTRAPOLATED = "extrapolated"
CALIBRATED = "calibrated"

# contact grasp of small objects
CONTACT_NO_OFFSET = 1.0
CONTACT_OFFSET_FLOOR = 0.9
NONCONTACT_LOW = 0.6
LOW_HEIGHT_LIMIT = 0.009

# paper: critical GSM per grasping position (meters from the paper edge)
CRITICAL_GSM_70MM = 80.0
CRITICAL_GSM_90MM = 120.0

# pry grasp of books, keyed by thickness (m) and prying angle (rad)
PRY_THIN = 1.0
PRY_9MM_FLAT = 0.8
PRY_12MM_OFF_OPTIMUM = 0.8
PRY_12MM_OPTIMUM = 1.0
PRY_24MM = 0.0
PRY_MAX_THICKNESS = 0.030

# push grasp of rulers
PUSH_STRAIGHT = 1.0
PUSH_TRIANGLE_ON_BOOK = 0.95
PUSH_TRIANGLE_ON_DESKTOP = 0.933

PRY_THICKNESSES = (0.0025, 0.0065, 0.009, 0.012, 0.024)
PRY_ALPHAS = tuple(math.radians(a) for a in (0, 3, 6, 9, 12, 15))
PAPER_OFFSETS = (0.05, 0.06, 0.07, 0.08, 0.09)


class FeasibilityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Cell:
    value: float
    provenance: str = MEASURED


def _default_contact() -> dict:
    t = {}
    for mode in ("contact", "noncontact"):
        for hb in ("le9mm", "gt9mm"):
            for ob in ("none", "offset"):
                if mode == "contact":
                    t[(mode, hb, ob)] = Cell(CONTACT_NO_OFFSET if ob == "none" else CONTACT_OFFSET_FLOOR)
                elif hb == "le9mm" and ob == "none":
                    t[(mode, hb, ob)] = Cell(NONCONTACT_LOW)
                else:
                    t[(mode, hb, ob)] = Cell(NONCONTACT_LOW, EXTRAPOLATED)
    return t


def _default_paper() -> dict:
    t = {}
    for off in PAPER_OFFSETS:
        if off == 0.07:
            t[off] = Cell(CRITICAL_GSM_70MM)
        elif off == 0.09:
            t[off] = Cell(CRITICAL_GSM_90MM)
        else:
            # nearest measured position; the 80 mm midpoint takes the lower value
            t[off] = Cell(CRITICAL_GSM_70MM, EXTRAPOLATED)
    return t


def _default_pry() -> dict:
    t = {}
    for th in PRY_THICKNESSES:
        for k, a in enumerate(PRY_ALPHAS):
            deg = 3 * k
            if th in (0.0025, 0.0065):
                cell = Cell(PRY_THIN)
            elif th == 0.009:
                cell = Cell(PRY_9MM_FLAT) if deg == 0 else Cell(PRY_THIN, EXTRAPOLATED)
            elif th == 0.012:
                if deg == 9:
                    cell = Cell(PRY_12MM_OPTIMUM)
                elif deg < 6 or deg > 12:
                    cell = Cell(PRY_12MM_OFF_OPTIMUM)
                else:
                    cell = Cell(0.9, EXTRAPOLATED)
            else:
                cell = Cell(PRY_24MM)
            t[(th, a)] = cell
    return t


def _default_push() -> dict:
    t = {}
    for support in ("book", "desktop"):
        t[("straight_ruler", support)] = Cell(PUSH_STRAIGHT)
        p = PUSH_TRIANGLE_ON_BOOK if support == "book" else PUSH_TRIANGLE_ON_DESKTOP
        for cat in ("triangle_ruler_30", "triangle_ruler_45"):
            t[(cat, support)] = Cell(p, CALIBRATED)
    return t


@dataclass
class FeasibilityTables:
    contact_grasp: dict = field(default_factory=_default_contact)
    paper_grasp: dict = field(default_factory=_default_paper)
    pry: dict = field(default_factory=_default_pry)
    push_grasp: dict = field(default_factory=_default_push)

    # -- CSV --------------------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["primitive", "param1", "param2", "probability", "provenance"])
        for (mode, hb, ob), c in self.contact_grasp.items():
            w.writerow(["contact_grasp", f"{mode}/{hb}", ob, repr(c.value), c.provenance])
        for off, c in self.paper_grasp.items():
            w.writerow(["paper_grasp", repr(off), repr(c.value), "1.0", c.provenance])
        for (th, a), c in self.pry.items():
            w.writerow(["pry", repr(th), repr(a), repr(c.value), c.provenance])
        for (cat, sup), c in self.push_grasp.items():
            w.writerow(["push_grasp", cat, sup, repr(c.value), c.provenance])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FeasibilityTables":
        tables = cls(contact_grasp={}, paper_grasp={}, pry={}, push_grasp={})
        for row in csv.DictReader(io.StringIO(text)):
            prim, p1, p2 = row["primitive"], row["param1"], row["param2"]
            prov = row["provenance"]
            if prim == "contact_grasp":
                mode, hb = p1.split("/")
                tables.contact_grasp[(mode, hb, p2)] = Cell(float(row["probability"]), prov)
            elif prim == "paper_grasp":
                tables.paper_grasp[float(p1)] = Cell(float(p2), prov)
            elif prim == "pry":
                tables.pry[(float(p1), float(p2))] = Cell(float(row["probability"]), prov)
            elif prim == "push_grasp":
                tables.push_grasp[(p1, p2)] = Cell(float(row["probability"]), prov)
            else:
                raise ValueError(f"unknown primitive {prim!r} in feasibility table")
        for cells in (tables.contact_grasp, tables.paper_grasp, tables.pry, tables.push_grasp):
            for c in cells.values():
                if not 0.0 <= c.value or (cells is not tables.paper_grasp and c.value > 1.0):
                    raise ValueError(f"cell value {c.value} out of range")
        return tables


def _nearest(value: float, keys, prefer_high: bool = False) -> float:
    best = None
    for k in sorted(keys):
        d = abs(k - value)
        if best is None or d < best[0] - 1e-15 or (prefer_high and abs(d - best[0]) <= 1e-15):
            best = (d, k)
    return best[1]


def height_band(height: float) -> str:
    return "le9mm" if height <= LOW_HEIGHT_LIMIT + 1e-12 else "gt9mm"


def offset_band(offset: tuple[float, float]) -> str:
    lat, lon = offset
    return "none" if max(abs(lat), abs(lon)) < 1.0 / 6.0 else "offset"


def contact_grasp_cell(tables: FeasibilityTables, mode: str, height: float,
                       offset: tuple[float, float] = (0.0, 0.0)) -> Cell:
    if mode not in ("contact", "noncontact"):
        raise ValueError(f"unknown grasp mode {mode!r}")
    return tables.contact_grasp[(mode, height_band(height), offset_band(offset))]


def contact_grasp_probability(tables: FeasibilityTables, mode: str, height: float,
                              offset: tuple[float, float] = (0.0, 0.0)) -> float:
    """Grasp-and-place success for a small object; offsets are fractions of the object dims."""
    return contact_grasp_cell(tables, mode, height, offset).value


def max_gripper_reach(gripper=None) -> float:
    from .primitives import GripperModel

    g = gripper or GripperModel()
    return g.max_opening


def critical_gsm(tables: FeasibilityTables, grasp_offset: float, gripper=None) -> float:
    reach = max_gripper_reach(gripper)
    if not 0.0 < grasp_offset <= reach + 1e-12:
        raise OffsetOutOfRange(f"grasp offset {grasp_offset} m outside (0, {reach}]")
    return tables.paper_grasp[_nearest(grasp_offset, tables.paper_grasp)].value


def paper_grasp_feasible(tables: FeasibilityTables, gsm: float, grasp_offset: float, gripper=None) -> bool:
    if gsm <= 0:
        raise ValueError("gsm must be positive")
    return gsm <= critical_gsm(tables, grasp_offset, gripper)


def pry_cell(tables: FeasibilityTables, thickness: float, alpha: float) -> Cell:
    if not 0.0 < thickness <= PRY_MAX_THICKNESS:
        warnings.warn(f"book thickness {thickness} m outside the tested range", FeasibilityWarning, stacklevel=3)
        return Cell(0.0, EXTRAPOLATED)
    ths = sorted({k[0] for k in tables.pry})
    alphas = sorted({k[1] for k in tables.pry})
    # ties between thickness bands resolve to the thicker (more pessimistic) band
    th = _nearest(thickness, ths, prefer_high=True)
    a = _nearest(alpha, alphas)
    return tables.pry[(th, a)]


def pry_probability(tables: FeasibilityTables, thickness: float, alpha: float) -> float:
    return pry_cell(tables, thickness, alpha).value


def push_grasp_cell(tables: FeasibilityTables, category: str, support_kind: str) -> Cell:
    return tables.push_grasp[(category, support_kind)]


def push_grasp_probability(tables: FeasibilityTables, category: str, support_kind: str) -> float:
    return push_grasp_cell(tables, category, support_kind).value
