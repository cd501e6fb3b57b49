"""Command-line interface.

Subcommands: ``plan`` (single-shot planning), ``replan`` (simulated
navigation with sensing), ``bench`` (suite runner), ``gen`` (synthetic
worlds), ``render`` (path overlays). Exit codes: 0 success, 1 plan/goal
failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .baselines import a_star, d_star_lite_navigate, rra_star_navigate, rrt_star, threshold_map
from .bench import report_csv, report_text, run_suite
from .grid import (
    MapFormatError,
    check_paired,
    load_gt_mask,
    load_prob_grid,
    resample,
    resample_mask,
    write_pgm,
)
from .metrics import norm_path_length, path_accuracy
from .render import render_overlay
from .scenario import load_manifest
from .search import PlannerParams, params_from_dict
from .synthetic import STYLES, gen_synthetic, pick_endpoints
from .ura import ura_star
from .urd import urd_navigate

PLAN_ALGOS = ("ura", "astar", "astar30", "rrt")
REPLAN_ALGOS = ("urd", "dlite", "rra")


class CellParam(click.ParamType):
    name = "cell"

    def convert(self, value, param, ctx):
        try:
            r, c = value.split(",")
            return (int(r), int(c))
        except ValueError:
            self.fail(f"{value!r} is not a row,col pair", param, ctx)


CELL = CellParam()


def _params(grid_shape, grid=None, **overrides) -> PlannerParams:
    """Params with the working grid defaulting to the input's native size."""
    opts = {k: v for k, v in overrides.items() if v is not None}
    if grid is not None:
        opts["grid_w"], opts["grid_h"] = grid
    else:
        opts.setdefault("grid_h", grid_shape[0])
        opts.setdefault("grid_w", grid_shape[1])
    return params_from_dict(opts)


def _load_inputs(map_path, gt_path, params):
    grid = load_prob_grid(map_path)
    mask = load_gt_mask(gt_path) if gt_path else None
    if mask is not None:
        check_paired(grid, mask)
    grid = resample(grid, params.grid_w, params.grid_h)
    if mask is not None:
        mask = resample_mask(mask, params.grid_w, params.grid_h)
    return grid, mask


def _write_path_json(out, algo, start, goal, path, cost, succeeded) -> None:
    payload = {
        "algo": algo,
        "start": list(start),
        "goal": list(goal),
        "succeeded": succeeded,
        "cost": cost,
        "path": [list(c) for c in path],
    }
    Path(out).write_text(json.dumps(payload) + "\n")


class _ErrorMappingGroup(click.Group):
    """Map library errors onto exit code 2 (I/O and configuration)."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (MapFormatError, ValueError, OSError) as exc:
            err = click.ClickException(str(exc))
            err.exit_code = 2
            raise err


@click.group(cls=_ErrorMappingGroup)
def main() -> None:
    """Plan and replan ground-robot paths over traversal-probability grids."""


def _common_plan_options(fn):
    fn = click.option("--map", "map_path", required=True, type=click.Path(), help="Probability map (PGM/PNG/CSV).")(fn)
    fn = click.option("--start", required=True, type=CELL, help="Start cell as row,col.")(fn)
    fn = click.option("--goal", required=True, type=CELL, help="Goal cell as row,col.")(fn)
    fn = click.option("--grid", type=CELL, default=None, help="Working grid as W,H (default: native size).")(fn)
    fn = click.option("--w-trav", type=float, default=None, help="Probability-cost weight.")(fn)
    fn = click.option("--alpha", type=float, default=None, help="f-value probability weight.")(fn)
    fn = click.option("--threshold", type=float, default=None, help="Baseline confidence cutoff.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True, help="RNG seed for sampling planners.")(fn)
    fn = click.option("--out", "out_path", type=click.Path(), default=None, help="Write the path as JSON.")(fn)
    return fn


@main.command()
@_common_plan_options
@click.option("--algo", type=click.Choice(PLAN_ALGOS), default="ura", show_default=True)
@click.option("--gt", "gt_path", type=click.Path(), default=None, help="Ground-truth mask (for accuracy report).")
@click.option("--epsilon-init", type=float, default=None, help="Anytime inflation start value.")
@click.option("--epsilon-step", type=float, default=None, help="Anytime inflation decrement.")
def plan(map_path, start, goal, grid, w_trav, alpha, threshold, seed, out_path, algo, gt_path, epsilon_init, epsilon_step):
    """Compute one path on a (noisy) probability map."""
    native = load_prob_grid(map_path)
    params = _params(
        native.shape, grid,
        w_trav=w_trav, alpha=alpha, threshold=threshold,
        epsilon_init=epsilon_init, epsilon_step=epsilon_step,
    )
    grid_m, mask = _load_inputs(map_path, gt_path, params)
    if algo == "ura":
        result = ura_star(grid_m.floored(), start, goal, params)
    elif algo == "astar":
        result = a_star(threshold_map(grid_m, params.threshold), start, goal)
    elif algo == "astar30":
        result = a_star(threshold_map(grid_m, 0.3), start, goal)
    else:
        result = rrt_star(
            threshold_map(grid_m, params.threshold), start, goal,
            step=params.rrt_step, radius=params.rrt_radius,
            iters=params.rrt_iters, rng_seed=seed,
        )
    if out_path:
        _write_path_json(out_path, algo, start, goal, result.path, result.cost, result.succeeded)
    if not result.succeeded:
        click.echo(f"{algo}: no path found ({result.nodes_expanded} nodes expanded)")
        sys.exit(1)
    line = (
        f"{algo}: cost {result.cost:.4f}, {len(result.path)} cells, "
        f"norm length {norm_path_length(result.path, start, goal):.4f}, "
        f"{result.nodes_expanded} nodes expanded"
    )
    if mask is not None:
        line += f", accuracy {path_accuracy(result.path, mask):.2f}%"
    click.echo(line)


@main.command()
@_common_plan_options
@click.option("--algo", type=click.Choice(REPLAN_ALGOS), default="urd", show_default=True)
@click.option("--gt", "gt_path", type=click.Path(), required=True, help="Ground-truth mask for the simulator.")
@click.option("--radius", type=int, default=None, help="Scan radius in cells.")
@click.option("--stall-limit", type=int, default=None, help="Stalled iterations before a tree reset.")
@click.option("--gamma-init", type=float, default=None, help="Replanner heuristic multiplier.")
@click.option("--gamma-decay", type=float, default=None, help="Gamma decay per reset.")
@click.option("--heuristic", type=click.Choice(["urd", "euclid", "euclid-goal"]), default="urd",
              show_default=True, help="Replanner key heuristic (ablation switch).")
@click.option("--trace", "trace_path", type=click.Path(), default=None, help="Per-step JSONL trace.")
def replan(map_path, start, goal, grid, w_trav, alpha, threshold, seed, out_path, algo, gt_path,
           radius, stall_limit, gamma_init, gamma_decay, heuristic, trace_path):
    """Simulate a robot navigating with sensing and replanning."""
    native = load_prob_grid(map_path)
    params = _params(
        native.shape, grid,
        w_trav=w_trav, alpha=alpha, threshold=threshold, scan_radius=radius,
        stall_limit=stall_limit, gamma_init=gamma_init, gamma_decay=gamma_decay,
    )
    grid_m, mask = _load_inputs(map_path, gt_path, params)
    if algo == "urd":
        nav = urd_navigate(grid_m, mask, start, goal, params, heuristic=heuristic, trace=trace_path)
    elif algo == "dlite":
        nav = d_star_lite_navigate(grid_m, mask, start, goal, params, trace=trace_path)
    else:
        nav = rra_star_navigate(grid_m, mask, start, goal, params, trace=trace_path)
    if out_path:
        _write_path_json(out_path, algo, start, goal, nav.traversed_path, float("nan"), nav.outcome == "reached")
    if nav.outcome != "reached":
        click.echo(
            f"{algo}: failed after {len(nav.traversed_path) - 1} moves "
            f"({nav.replans} replans, {nav.resets} resets, {nav.nodes_expanded} nodes expanded)"
        )
        sys.exit(1)
    click.echo(
        f"{algo}: reached in {len(nav.traversed_path) - 1} moves, "
        f"norm length {norm_path_length(nav.traversed_path, start, goal):.4f}, "
        f"{nav.replans} replans, {nav.resets} resets, {nav.nodes_expanded} nodes expanded"
    )


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(), help="Suite manifest JSON.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the CSV report here.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel scenario workers.")
@click.option("--oracle", is_flag=True, help="Also run the exact composite-cost reference planner.")
def bench(manifest_path, out_path, jobs, oracle):
    """Run a benchmark suite and print the summary table."""
    manifest = load_manifest(manifest_path)
    report = run_suite(manifest, jobs=jobs, extra_methods=("oracle",) if oracle else ())
    if out_path:
        Path(out_path).write_text(report_csv(report))
    click.echo(report_text(report), nl=False)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--style", type=click.Choice(STYLES), default="corridors", show_default=True)
@click.option("--noise", type=float, default=0.3, show_default=True)
@click.option("--width", type=int, default=64, show_default=True)
@click.option("--height", type=int, default=64, show_default=True)
@click.option("--count", type=int, default=1, show_default=True, help="Scenarios to generate (suite manifest written when > 1).")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
def gen(seed, style, noise, width, height, count, out_dir):
    """Generate synthetic probability maps, masks, and scenario files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for i in range(count):
        s = seed + i
        grid, mask = gen_synthetic(s, width, height, style, noise)
        start, goal = pick_endpoints(mask, seed=s)
        map_name = f"map_{s:04d}.pgm"
        gt_name = f"gt_{s:04d}.pgm"
        scen_name = f"scenario_{s:04d}.json"
        write_pgm(grid.probs, out / map_name)
        write_pgm(mask.labels, out / gt_name)
        scenario = {
            "map": map_name,
            "gt": gt_name,
            "start": list(start),
            "goal": list(goal),
            "params": {"grid_w": width, "grid_h": height},
        }
        (out / scen_name).write_text(json.dumps(scenario, indent=2) + "\n")
        names.append(scen_name)
    if count > 1:
        suite = {"seed": seed, "methods": ["ura", "astar"], "scenarios": names}
        (out / "suite.json").write_text(json.dumps(suite, indent=2) + "\n")
    click.echo(f"wrote {count} scenario(s) to {out}")


@main.command("render")
@click.option("--map", "map_path", required=True, type=click.Path(), help="Background probability map.")
@click.option("--path", "path_files", multiple=True, type=click.Path(), help="Path JSON file(s) from plan/replan --out.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output image (.png or .ppm).")
@click.option("--scale", type=int, default=1, show_default=True, help="Integer pixel upscale.")
def render_cmd(map_path, path_files, out_path, scale):
    """Render path overlays on a probability map."""
    grid = load_prob_grid(map_path)
    paths = []
    start = goal = None
    for pf in path_files:
        try:
            payload = json.loads(Path(pf).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise MapFormatError(f"cannot read path file {pf}: {exc}") from exc
        paths.append([tuple(c) for c in payload.get("path", [])])
        if payload.get("start") is not None:
            start = tuple(payload["start"])
        if payload.get("goal") is not None:
            goal = tuple(payload["goal"])
    render_overlay(grid, paths, out_path, start=start, goal=goal, scale=scale)
    click.echo(f"wrote {out_path}")


def entry() -> None:
    """Console entry point."""
    main()


if __name__ == "__main__":
    entry()
