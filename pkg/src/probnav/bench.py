"""Suite runner: executes planning and replanning methods over scenarios and
writes machine (CSV) and human (aligned text) reports.

Planning methods: ``ura``, ``astar`` (threshold from params), ``astar30``
(30% threshold), ``rrt``, and ``oracle`` (exact composite-cost reference).
Replanning methods: ``urd``, ``dlite``, ``rra``; their metrics are computed
on the actually traversed trajectory. All randomness derives from the suite
seed, so a rerun produces byte-identical reports.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

from .baselines import a_star, d_star_lite_navigate, rra_star_navigate, rrt_star, threshold_map
from .grid import GroundTruthMask, ProbGrid
from .metrics import BenchReport, Metrics, aggregate, norm_path_length, path_accuracy
from .scenario import Manifest, Scenario, materialize
from .search import PlannerParams, dijkstra_oracle
from .ura import ura_star
from .urd import urd_navigate

PLAN_METHODS = ("ura", "astar", "astar30", "rrt", "oracle")
REPLAN_METHODS = ("urd", "dlite", "rra")
ALL_METHODS = PLAN_METHODS + REPLAN_METHODS


def run_method(
    method: str,
    grid: ProbGrid,
    mask: GroundTruthMask | None,
    start,
    goal,
    params: PlannerParams,
    seed: int = 0,
) -> Metrics:
    """Run one method on one materialized scenario and score it."""
    if method in REPLAN_METHODS:
        if mask is None:
            raise ValueError(f"method {method!r} needs a ground-truth mask")
        nav = {
            "urd": urd_navigate,
            "dlite": d_star_lite_navigate,
            "rra": rra_star_navigate,
        }[method](grid, mask, start, goal, params)
        out = Metrics(success=nav.outcome == "reached", nodes_expanded=nav.nodes_expanded)
        if out.success:
            out.norm_path_length = norm_path_length(nav.traversed_path, start, goal)
            if mask is not None:
                out.path_accuracy = path_accuracy(nav.traversed_path, mask)
        return out

    if method == "ura":
        result = ura_star(grid.floored(), start, goal, params)
    elif method == "astar":
        result = a_star(threshold_map(grid, params.threshold), start, goal)
    elif method == "astar30":
        result = a_star(threshold_map(grid, 0.3), start, goal)
    elif method == "rrt":
        result = rrt_star(
            threshold_map(grid, params.threshold),
            start,
            goal,
            step=params.rrt_step,
            radius=params.rrt_radius,
            iters=params.rrt_iters,
            rng_seed=seed,
        )
    elif method == "oracle":
        result = dijkstra_oracle(grid.floored(), start, goal, params.w_trav)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = Metrics(success=result.succeeded, nodes_expanded=result.nodes_expanded)
    if result.succeeded:
        out.norm_path_length = norm_path_length(result.path, start, goal)
        if mask is not None:
            out.path_accuracy = path_accuracy(result.path, mask)
    return out


def _run_scenario(args) -> tuple[str, dict[str, Metrics]]:
    scenario, methods, seed, index = args
    grid, mask = materialize(scenario)
    row: dict[str, Metrics] = {}
    for method in methods:
        row[method] = run_method(
            method, grid, mask, scenario.start, scenario.goal, scenario.params,
            seed=seed * 100003 + index,
        )
    return scenario.name, row


def run_suite(manifest: Manifest, jobs: int = 1, extra_methods: tuple[str, ...] = ()) -> BenchReport:
    """Run every manifest method over every scenario and aggregate.

    Scenarios are independent; with ``jobs > 1`` they run in worker
    processes, and results are reduced in manifest order either way.
    """
    methods = list(dict.fromkeys(list(manifest.methods) + list(extra_methods)))
    for m in methods:
        if m not in ALL_METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {ALL_METHODS}")
    names = [s.name for s in manifest.scenarios]
    if len(set(names)) != len(names):
        raise ValueError("scenario names in a suite must be unique")
    tasks = [(s, methods, manifest.seed, i) for i, s in enumerate(manifest.scenarios)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_scenario, tasks))
    else:
        rows = [_run_scenario(t) for t in tasks]
    results: dict[str, dict[str, Metrics]] = {m: {} for m in methods}
    for name, row in rows:
        for m in methods:
            results[m][name] = row[m]
    return aggregate(results)


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.6f}"


def report_csv(report: BenchReport) -> str:
    """Serialize a report as CSV: per-scenario rows then aggregate rows."""
    lines = ["scenario,method,success,norm_path_length,path_accuracy,nodes_expanded,penalized"]
    penalized = {(m, s) for m, s, _ in report.penalized}
    for sid in report.scenario_ids:
        for m in report.methods:
            met = report.per_scenario[m][sid]
            lines.append(
                f"{sid},{m},{int(met.success)},{_fmt(met.norm_path_length)},"
                f"{_fmt(met.path_accuracy)},{met.nodes_expanded},{int((m, sid) in penalized)}"
            )
    for m in report.methods:
        agg = report.aggregates[m]
        lines.append(
            f"__aggregate__,{m},{_fmt(agg['success_rate'])},{_fmt(agg['norm_path_length'])},"
            f"{_fmt(agg['path_accuracy'])},{_fmt(agg['nodes_expanded'])},"
        )
    return "\n".join(lines) + "\n"


def report_text(report: BenchReport) -> str:
    """Aligned per-method summary table (one row per method)."""
    header = ("Method", "Norm. Path Length", "Path Acc.(%)", "Success Rate(%)", "Avg. Nodes Expanded")
    rows = [header]
    for m in report.methods:
        agg = report.aggregates[m]
        rows.append(
            (
                m,
                _fmt(agg["norm_path_length"]) or "-",
                _fmt(agg["path_accuracy"]) or "-",
                _fmt(agg["success_rate"]) or "-",
                _fmt(agg["nodes_expanded"]) or "-",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    out = []
    for r in rows:
        out.append("  ".join(val.ljust(w) for val, w in zip(r, widths)).rstrip())
    if report.dropped:
        out.append(f"dropped scenarios (no method succeeded): {', '.join(report.dropped)}")
    out.append("note: failed runs contribute the per-scenario maximum normalized length;")
    out.append("      path accuracy is averaged over successful runs only.")
    return "\n".join(out) + "\n"
