"""Batch runner over the scenario catalog with grouped success statistics."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .planner import build_plan, execute
from .sim.actions import SimConfig
from .sim.scenarios import CxyzSpec, catalog, load_golden
from .sim.world import RULERS, TRIANGLE_RULERS, Scene

CSV_FIELDS = ("scenario", "trial", "outcome", "cause", "actions")


def episode_seed(seed: int, scenario_index: int, trial: int) -> int:
    """Independent per-episode seed derived from (seed, scenario index, trial)."""
    return int(np.random.SeedSequence([int(seed), scenario_index, trial]).generate_state(1)[0])


def ruler_group(scene: Scene) -> str:
    cats = {o.category for o in scene.objects}
    if cats & TRIANGLE_RULERS:
        return "triangular"
    if cats & RULERS:
        return "straight"
    return "none"


@dataclass
class SuiteResult:
    rows: list[dict] = field(default_factory=list)
    groups: dict[str, str] = field(default_factory=dict)  # scenario -> ruler group

    def success_rate(self, scenarios=None) -> float:
        rows = [r for r in self.rows if scenarios is None or r["scenario"] in scenarios]
        if not rows:
            return float("nan")
        return sum(r["outcome"] == "success" for r in rows) / len(rows)

    def per_scenario(self) -> dict[str, tuple[int, int]]:
        out: dict[str, list[int]] = {}
        for r in self.rows:
            s = out.setdefault(r["scenario"], [0, 0])
            s[0] += r["outcome"] == "success"
            s[1] += 1
        return {k: (v[0], v[1]) for k, v in out.items()}

    def grouped(self) -> dict[str, dict[str, float]]:
        """Mean success by category count, ruler presence and ruler type."""
        scen = sorted(self.groups)
        by_x: dict[str, set] = {}
        for s in scen:
            by_x.setdefault(f"x={CxyzSpec.parse(s).x}", set()).add(s)
        presence = {
            "no_ruler": {s for s in scen if self.groups[s] == "none"},
            "ruler": {s for s in scen if self.groups[s] != "none"},
        }
        kind = {
            "straight": {s for s in scen if self.groups[s] == "straight"},
            "triangular": {s for s in scen if self.groups[s] == "triangular"},
        }
        out = {}
        for family, groups in (("categories", by_x), ("ruler_presence", presence), ("ruler_type", kind)):
            out[family] = {}
            for name, members in sorted(groups.items()):
                n = sum(1 for r in self.rows if r["scenario"] in members)
                out[family][name] = {"trials": n, "success_rate": self.success_rate(members)}
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()

    def groups_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "group", "trials", "success_rate"])
        for family, groups in self.grouped().items():
            for name, st in groups.items():
                w.writerow([family, name, st["trials"], f"{st['success_rate']:.6f}"])
        return buf.getvalue()


def run_suite(trials: int = 5, mode: str = "deterministic", seed: int = 0, cfg: SimConfig = SimConfig(),
              labels=None, scenes: dict[str, Scene] | None = None) -> SuiteResult:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    labels = list(labels or catalog())
    result = SuiteResult()
    for idx, label in enumerate(labels):
        scene = scenes[label] if scenes and label in scenes else load_golden(label)
        result.groups[label] = ruler_group(scene)
        plan = build_plan(scene, cfg)
        for t in range(trials):
            rep = execute(scene, plan, mode, episode_seed(seed, idx, t), cfg)
            result.rows.append({"scenario": label, "trial": t, "outcome": rep.outcome,
                                "cause": rep.cause, "actions": rep.completed_actions})
    return result
