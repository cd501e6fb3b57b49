"""Evaluation metrics and the benchmark aggregation rule.

Normalized path length divides the geometric path length by the straight
line start-goal distance (1.0 is the geometric ideal). Path accuracy is the
percentage of path cells that are truly traversable. When a method fails on
a scenario, its normalized length is replaced by the maximum any method
achieved on that scenario before averaging, so failures worsen the mean;
accuracy is averaged over successful runs only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .grid import Cell, GroundTruthMask, euclid

log = logging.getLogger(__name__)

NAN = float("nan")


@dataclass
class Metrics:
    """Per-run metrics; norm_path_length/path_accuracy are NaN on failure."""

    norm_path_length: float = NAN
    path_accuracy: float = NAN
    success: bool = False
    nodes_expanded: int = 0


def path_length(path: list[Cell]) -> float:
    """Sum of Euclidean step lengths along a cell path."""
    return sum(euclid(a, b) for a, b in zip(path, path[1:]))


def norm_path_length(path: list[Cell], start: Cell, goal: Cell) -> float:
    """Path length divided by the straight-line start-goal distance."""
    if start == goal:
        raise ValueError("normalized length undefined for start == goal")
    if not path:
        raise ValueError("normalized length undefined for an empty path")
    return path_length(path) / euclid(start, goal)


def path_accuracy(path: list[Cell], gt: GroundTruthMask) -> float:
    """Percentage of path cells lying in traversable ground-truth cells."""
    if not path:
        raise ValueError("path accuracy undefined for an empty path")
    good = sum(1 for cell in path if gt.traversable(cell))
    return 100.0 * good / len(path)


@dataclass
class BenchReport:
    """Aggregated benchmark results.

    ``per_scenario[method][scenario_id]`` holds the raw metrics;
    ``aggregates[method]`` holds mean norm length (after failure-penalty
    substitution), mean accuracy over successes, success rate in percent,
    and mean nodes expanded. ``penalized`` records the (method, scenario)
    pairs whose length was substituted and ``dropped`` the scenarios no
    method solved.
    """

    methods: list[str] = field(default_factory=list)
    scenario_ids: list[str] = field(default_factory=list)
    per_scenario: dict[str, dict[str, Metrics]] = field(default_factory=dict)
    aggregates: dict[str, dict[str, float]] = field(default_factory=dict)
    penalized: list[tuple[str, str, float]] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else NAN


def aggregate(results: dict[str, dict[str, Metrics]]) -> BenchReport:
    """Fold per-scenario metrics into per-method aggregates.

    ``results[method][scenario_id]`` must cover the same scenario ids for
    every method. Scenario order does not affect the aggregates; scenarios
    where every method failed are dropped with a warning.
    """
    methods = sorted(results)
    if not methods:
        return BenchReport()
    scenario_ids = sorted(results[methods[0]])
    for m in methods:
        if sorted(results[m]) != scenario_ids:
            raise ValueError(f"method {m!r} does not cover the same scenarios")

    report = BenchReport(methods=methods, scenario_ids=scenario_ids, per_scenario=results)
    norm_for_mean: dict[str, list[float]] = {m: [] for m in methods}
    for sid in scenario_ids:
        successes = [m for m in methods if results[m][sid].success]
        if not successes:
            report.dropped.append(sid)
            log.warning("scenario %s: no method succeeded; dropped from means", sid)
            continue
        max_norm = max(results[m][sid].norm_path_length for m in successes)
        for m in methods:
            metric = results[m][sid]
            if metric.success:
                norm_for_mean[m].append(metric.norm_path_length)
            else:
                norm_for_mean[m].append(max_norm)
                report.penalized.append((m, sid, max_norm))

    n_scen = len(scenario_ids)
    for m in methods:
        rows = results[m]
        accs = [rows[s].path_accuracy for s in scenario_ids
                if rows[s].success and not math.isnan(rows[s].path_accuracy)]
        report.aggregates[m] = {
            "norm_path_length": _mean(norm_for_mean[m]),
            "path_accuracy": _mean(accs),
            "success_rate": 100.0 * sum(rows[s].success for s in scenario_ids) / n_scen,
            "nodes_expanded": _mean([float(rows[s].nodes_expanded) for s in scenario_ids]),
        }
    return report
