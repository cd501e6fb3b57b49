"""probnav: uncertainty-aware path planning and replanning on
traversal-probability grids, with classical baselines, a sensing simulator,
and a benchmark harness."""

from .baselines import (
    BinaryMap,
    a_star,
    d_star_lite_navigate,
    rra_star_navigate,
    rrt_star,
    threshold_map,
)
from .bench import run_method, run_suite
from .grid import (
    PROB_FLOOR,
    Cell,
    GroundTruthMask,
    MapFormatError,
    ProbGrid,
    bresenham_line,
    check_paired,
    euclid,
    load_gt_mask,
    load_prob_grid,
    resample,
    resample_mask,
    reveal,
    scan_visible,
    write_pgm,
)
from .metrics import (
    BenchReport,
    Metrics,
    aggregate,
    norm_path_length,
    path_accuracy,
    path_length,
)
from .render import render_overlay
from .scenario import Manifest, Scenario, load_manifest, load_scenario, materialize
from .search import (
    EmptyQueueError,
    PlannerParams,
    PlanResult,
    PriorityQueue,
    dijkstra_oracle,
    edge_cost,
    neighbors,
    path_cost,
)
from .synthetic import gen_synthetic, pick_endpoints
from .ura import UraStar, ura_f_value, ura_star
from .urd import DStarLite, NavResult, urd_heuristic, urd_navigate

__version__ = "0.1.0"

__all__ = [
    "BinaryMap",
    "BenchReport",
    "Cell",
    "DStarLite",
    "EmptyQueueError",
    "GroundTruthMask",
    "Manifest",
    "MapFormatError",
    "Metrics",
    "NavResult",
    "PROB_FLOOR",
    "PlanResult",
    "PlannerParams",
    "PriorityQueue",
    "ProbGrid",
    "Scenario",
    "UraStar",
    "a_star",
    "aggregate",
    "bresenham_line",
    "check_paired",
    "d_star_lite_navigate",
    "dijkstra_oracle",
    "edge_cost",
    "euclid",
    "gen_synthetic",
    "load_gt_mask",
    "load_manifest",
    "load_prob_grid",
    "load_scenario",
    "materialize",
    "neighbors",
    "norm_path_length",
    "path_accuracy",
    "path_cost",
    "path_length",
    "pick_endpoints",
    "render_overlay",
    "resample",
    "resample_mask",
    "reveal",
    "rra_star_navigate",
    "rrt_star",
    "run_method",
    "run_suite",
    "scan_visible",
    "threshold_map",
    "ura_f_value",
    "ura_star",
    "urd_heuristic",
    "urd_navigate",
    "write_pgm",
]
