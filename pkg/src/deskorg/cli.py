"""Command-line entry points: organize, suite, render and feasibility-dump."""
from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import click

from .errors import DeskOrgError
from .feasibility import FeasibilityTables
from .planner import build_plan, execute
from .render import render_svg
from .sim.actions import MODES, SimConfig
from .sim.scenarios import CxyzSpec, generate_scenario, load_golden
from .sim.world import TRIANGLE_RULERS, load_scene

OUT_ENV = "DESKORG_OUT"


def _config(theta_p, theta_g, overhang, yaw_noise) -> SimConfig:
    cfg = SimConfig()
    prim = cfg.primitives
    try:
        if theta_p is not None:
            prim = replace(prim, theta_p=math.radians(theta_p))
        if theta_g is not None:
            prim = replace(prim, theta_g=math.radians(theta_g))
        if overhang is not None:
            prim = replace(prim, overhang_delta=overhang)
        noise = dict(cfg.yaw_noise)
        if yaw_noise is not None:
            noise = {c: math.radians(yaw_noise) for c in sorted(TRIANGLE_RULERS)}
        return replace(cfg, primitives=prim, yaw_noise=noise)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


def _load(scene_path, scenario, layout_seed):
    if (scene_path is None) == (scenario is None):
        raise click.UsageError("give exactly one of --scene or --scenario")
    try:
        if scene_path is not None:
            return load_scene(scene_path)
        spec = CxyzSpec.parse(scenario)
        return load_golden(spec) if layout_seed is None else generate_scenario(spec, layout_seed)
    except (DeskOrgError, OSError) as exc:
        raise click.ClickException(str(exc)) from None


def _outdir(out) -> Path:
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise click.ClickException(f"cannot create output directory {path}: {exc}") from None
    return path


scene_opts = [
    click.option("--scene", "scene_path", type=click.Path(dir_okay=False), help="Scene JSON file."),
    click.option("--scenario", help="Catalog label such as C311."),
    click.option("--layout-seed", type=int, default=None,
                 help="Generate a fresh layout for --scenario instead of the golden file."),
]
tuning_opts = [
    click.option("--theta-p", type=float, default=None, help="Push-pose tilt in degrees (default 30)."),
    click.option("--theta-g", type=float, default=None, help="Grasp-pose tilt in degrees (default 45)."),
    click.option("--overhang", type=float, default=None, help="Push overhang in meters (default 0.015)."),
    click.option("--yaw-noise", type=float, default=None,
                 help="Triangular-ruler in-hand yaw noise, degrees one sigma (default 6)."),
]


def _apply(opts):
    def deco(f):
        for o in reversed(opts):
            f = o(f)
        return f
    return deco


@click.group()
def main():
    """Desk-organization planning toolkit."""


@main.command()
@_apply(scene_opts)
@click.option("--mode", type=click.Choice(MODES), default="deterministic", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Episode seed.")
@click.option("--out", envvar=OUT_ENV, default="deskorg-out", show_default=True, help="Output directory.")
@_apply(tuning_opts)
def organize(scene_path, scenario, layout_seed, mode, seed, out, theta_p, theta_g, overhang, yaw_noise):
    """Plan and run one episode; write report.json and per-step SVG frames."""
    scene = _load(scene_path, scenario, layout_seed)
    cfg = _config(theta_p, theta_g, overhang, yaw_noise)
    try:
        plan = build_plan(scene, cfg)
    except DeskOrgError as exc:
        raise click.ClickException(f"planning failed: {exc}") from None
    report = execute(scene, plan, mode, seed, cfg, record_frames=True)
    outdir = _outdir(out)
    frames = outdir / "frames"
    frames.mkdir(exist_ok=True)
    for i, frame in enumerate(report.frames):
        label = "initial" if i == 0 else plan.actions[i - 1].describe()
        (frames / f"step_{i:03d}.svg").write_text(render_svg(frame, f"{scene.name or 'scene'}: {label}"))
    (outdir / "report.json").write_text(report.to_json())
    click.echo("index,kind,object_id,outcome,cause")
    for a in report.actions:
        click.echo(f"{a['index']},{a['kind']},{a['object_id']},{a['outcome']},{a['cause']}")
    click.echo(f"# outcome={report.outcome} cause={report.cause} report={outdir / 'report.json'}")


@main.command()
@click.option("--trials", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--mode", type=click.Choice(MODES), default="deterministic", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", envvar=OUT_ENV, default="deskorg-out", show_default=True, help="Output directory.")
@_apply(tuning_opts)
def suite(trials, mode, seed, out, theta_p, theta_g, overhang, yaw_noise):
    """Run every catalog scenario; write summary.csv, groups.csv and suite.png."""
    from .figures import suite_figure
    from .suite import run_suite

    cfg = _config(theta_p, theta_g, overhang, yaw_noise)
    result = run_suite(trials, mode, seed, cfg)
    outdir = _outdir(out)
    (outdir / "summary.csv").write_text(result.to_csv())
    (outdir / "groups.csv").write_text(result.groups_csv())
    suite_figure(result.grouped(), outdir / "suite.png")
    click.echo("scenario,successes,trials")
    for label, (ok, n) in result.per_scenario().items():
        click.echo(f"{label},{ok},{n}")
    click.echo(result.groups_csv(), nl=False)


@main.command()
@_apply(scene_opts)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="SVG file to write.")
def render(scene_path, scenario, layout_seed, out):
    """Draw a scene top-down as SVG."""
    scene = _load(scene_path, scenario, layout_seed)
    try:
        Path(out).write_text(render_svg(scene))
    except OSError as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(out)


@main.command("feasibility-dump")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV file (stdout if omitted).")
@click.option("--figure", type=click.Path(dir_okay=False), default=None, help="Optional PNG of the pry table.")
def feasibility_dump(out, figure):
    """Print the feasibility tables as CSV."""
    tables = FeasibilityTables()
    text = tables.to_csv()
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    if figure:
        from .figures import pry_heatmap

        pry_heatmap(tables, figure)


if __name__ == "__main__":
    main()
