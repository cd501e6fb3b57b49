"""Scenario and suite-manifest handling.

A scenario JSON file describes one planning problem:

    {"map": "map.pgm", "gt": "gt.pgm", "start": [r, c], "goal": [r, c],
     "params": {"grid_w": 64, "grid_h": 64, ...}}

``gt`` is optional for pure planning. When ``params`` omits the working
grid size it defaults to the map's native size (no resampling). A manifest
lists a suite:

    {"seed": 0, "methods": ["ura", "astar"], "scenarios": [
        "scenario_000.json",
        {"synthetic": {"seed": 3, "style": "corridors", "noise": 0.3,
                       "width": 64, "height": 64}, "params": {...}}
    ]}

Synthetic entries are generated in memory, fully determined by their spec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .grid import (
    Cell,
    GroundTruthMask,
    MapFormatError,
    ProbGrid,
    check_paired,
    load_gt_mask,
    load_prob_grid,
    resample,
    resample_mask,
)
from .search import PlannerParams, params_from_dict
from .synthetic import gen_synthetic, pick_endpoints


@dataclass(frozen=True)
class Scenario:
    """One planning problem: a map, an optional paired mask, endpoints, params."""

    prob_map_path: str | None
    gt_mask_path: str | None
    start: Cell
    goal: Cell
    params: PlannerParams
    synthetic: dict | None = None
    name: str = "scenario"


def _parse_cell(value, label: str) -> Cell:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, int) for v in value)
    ):
        raise MapFormatError(f"{label} must be a [row, col] pair of integers, got {value!r}")
    return (value[0], value[1])


def scenario_from_dict(data: dict, base_dir: Path | None = None, name: str = "scenario") -> Scenario:
    """Build a Scenario from decoded JSON, resolving paths against base_dir."""
    base = Path(base_dir) if base_dir is not None else Path(".")
    params_dict = dict(data.get("params") or {})
    if "synthetic" in data:
        spec = dict(data["synthetic"])
        for key in ("seed", "style", "noise", "width", "height"):
            if key not in spec:
                raise MapFormatError(f"synthetic scenario missing {key!r}")
        params_dict.setdefault("grid_w", spec["width"])
        params_dict.setdefault("grid_h", spec["height"])
        _, gt = gen_synthetic(
            spec["seed"], spec["width"], spec["height"], spec["style"], spec["noise"]
        )
        if "start" in data or "goal" in data:
            start = _parse_cell(data["start"], "start")
            goal = _parse_cell(data["goal"], "goal")
        else:
            start, goal = pick_endpoints(gt, seed=spec["seed"])
        return Scenario(
            prob_map_path=None,
            gt_mask_path=None,
            start=start,
            goal=goal,
            params=params_from_dict(params_dict),
            synthetic=spec,
            name=name,
        )
    if "map" not in data:
        raise MapFormatError("scenario needs either a 'map' path or a 'synthetic' spec")
    map_path = str(base / data["map"])
    gt_path = str(base / data["gt"]) if data.get("gt") else None
    start = _parse_cell(data["start"], "start")
    goal = _parse_cell(data["goal"], "goal")
    if "grid_w" not in params_dict or "grid_h" not in params_dict:
        native = load_prob_grid(map_path)
        params_dict.setdefault("grid_w", native.width)
        params_dict.setdefault("grid_h", native.height)
    return Scenario(
        prob_map_path=map_path,
        gt_mask_path=gt_path,
        start=start,
        goal=goal,
        params=params_from_dict(params_dict),
        name=name,
    )


def load_scenario(path) -> Scenario:
    """Load a scenario JSON file."""
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MapFormatError(f"cannot read scenario {p}: {exc}") from exc
    return scenario_from_dict(data, base_dir=p.parent, name=p.stem)


def materialize(scenario: Scenario) -> tuple[ProbGrid, GroundTruthMask | None]:
    """Load (or generate) the scenario's grids at the working resolution and
    validate the endpoint invariants."""
    params = scenario.params
    if scenario.synthetic is not None:
        spec = scenario.synthetic
        grid, mask = gen_synthetic(
            spec["seed"], spec["width"], spec["height"], spec["style"], spec["noise"]
        )
    else:
        grid = load_prob_grid(scenario.prob_map_path)
        mask = load_gt_mask(scenario.gt_mask_path) if scenario.gt_mask_path else None
        if mask is not None:
            check_paired(grid, mask)
    grid = resample(grid, params.grid_w, params.grid_h)
    if mask is not None:
        mask = resample_mask(mask, params.grid_w, params.grid_h)
    if scenario.start == scenario.goal:
        raise ValueError(f"{scenario.name}: start and goal must differ")
    for label, cell in (("start", scenario.start), ("goal", scenario.goal)):
        if not grid.in_bounds(cell):
            raise ValueError(
                f"{scenario.name}: {label} {cell} outside the {params.grid_h}x{params.grid_w} working grid"
            )
    return grid, mask


@dataclass(frozen=True)
class Manifest:
    """A benchmark suite: scenarios, the methods to run, and the base seed."""

    scenarios: list[Scenario]
    methods: list[str]
    seed: int


def load_manifest(path) -> Manifest:
    """Load a suite manifest JSON file."""
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MapFormatError(f"cannot read manifest {p}: {exc}") from exc
    entries = data.get("scenarios")
    if not entries:
        raise MapFormatError(f"manifest {p} lists no scenarios")
    scenarios = []
    for i, entry in enumerate(entries):
        if isinstance(entry, str):
            scenarios.append(load_scenario(p.parent / entry))
        elif isinstance(entry, dict):
            scenarios.append(scenario_from_dict(entry, base_dir=p.parent, name=f"scenario_{i:03d}"))
        else:
            raise MapFormatError(f"manifest entry {i} must be a path or an object")
    methods = data.get("methods") or ["ura", "astar"]
    return Manifest(scenarios=scenarios, methods=list(methods), seed=int(data.get("seed", 0)))
