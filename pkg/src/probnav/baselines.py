"""Reference planners to benchmark against: thresholded A* (and its 30%
variant), RRT*, plain D*-lite navigation, and replan-on-invalidation A*.

The binarizing planners convert the probability map into free/blocked cells
at a confidence cutoff and plan geometrically; the navigating baselines ride
the exact same scan/reveal simulation loop as the uncertainty-aware
replanner, so benchmark comparisons differ only in planner logic.
"""

from __future__ import annotations

import heapq
import math
import random

import numpy as np

from .grid import Cell, GroundTruthMask, ProbGrid, bresenham_line, euclid
from .search import INF, OFFSETS, SQRT2, PlannerParams, PlanResult, _reconstruct
from .urd import DStarLite, NavResult, _run_navigation


class BinaryMap:
    """Free/blocked grid derived from a probability map. ``free[row, col]``."""

    __slots__ = ("free",)

    def __init__(self, free) -> None:
        arr = np.ascontiguousarray(free, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"binary map must be 2D, got shape {arr.shape}")
        self.free = arr

    @property
    def height(self) -> int:
        return self.free.shape[0]

    @property
    def width(self) -> int:
        return self.free.shape[1]

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.free.shape[0] and 0 <= cell[1] < self.free.shape[1]

    def is_free(self, cell: Cell) -> bool:
        return bool(self.free[cell[0], cell[1]])


def threshold_map(grid: ProbGrid, tau: float) -> BinaryMap:
    """Binarize a probability map: a cell is free iff M(s) >= tau."""
    if not 0 < tau < 1:
        raise ValueError("threshold must lie in (0, 1)")
    return BinaryMap(grid.probs >= tau)


def a_star(bm: BinaryMap, start: Cell, goal: Cell) -> PlanResult:
    """Optimal geometric path over free cells (unit/sqrt(2) steps, Euclidean
    heuristic). Fails, rather than raising, on blocked or disconnected
    endpoints."""
    if not bm.in_bounds(start) or not bm.in_bounds(goal):
        raise ValueError(f"endpoints {start}->{goal} outside {bm.height}x{bm.width} map")
    if not bm.is_free(start) or not bm.is_free(goal):
        return PlanResult(succeeded=False)
    h, w = bm.free.shape
    free = bm.free.ravel().tolist()
    n = h * w
    g = [INF] * n
    parent = [-1] * n
    closed = bytearray(n)
    gr, gc = goal
    s_idx = start[0] * w + start[1]
    t_idx = gr * w + gc
    g[s_idx] = 0.0
    heap = [(euclid(start, goal), s_idx)]
    pop = heapq.heappop
    push = heapq.heappush
    hypot = math.hypot
    expanded = 0
    while heap:
        f, idx = pop(heap)
        if closed[idx] or f != g[idx] + hypot(idx // w - gr, idx % w - gc):
            continue
        closed[idx] = 1
        expanded += 1
        if idx == t_idx:
            break
        r, c = divmod(idx, w)
        gs = g[idx]
        for dr, dc, step in OFFSETS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w:
                j = nr * w + nc
                if closed[j] or not free[j]:
                    continue
                ng = gs + step
                if ng < g[j]:
                    g[j] = ng
                    parent[j] = idx
                    push(heap, (ng + hypot(nr - gr, nc - gc), j))
    if g[t_idx] == INF or not closed[t_idx]:
        return PlanResult(nodes_expanded=expanded, succeeded=False)
    return PlanResult(
        path=_reconstruct(parent, t_idx, w),
        cost=g[t_idx],
        nodes_expanded=expanded,
        succeeded=True,
    )


# ---------------------------------------------------------------------------
# RRT*


def _segment_free(bm: BinaryMap, a: Cell, b: Cell) -> bool:
    free = bm.free
    for r, c in bresenham_line(a, b):
        if not free[r, c]:
            return False
    return True


def _cells_path_cost(path: list[Cell]) -> float:
    return sum(SQRT2 if (a[0] != b[0] and a[1] != b[1]) else 1.0 for a, b in zip(path, path[1:]))


def rrt_star(
    bm: BinaryMap,
    start: Cell,
    goal: Cell,
    step: int = 5,
    radius: int = 50,
    iters: int = 10000,
    rng_seed: int = 0,
) -> PlanResult:
    """Sampling-based planner with rewiring on a binary map.

    Samples free cells uniformly (5% goal bias), steers at most ``step``
    cells toward each sample, collision-checks segments cell by cell, and
    rewires within ``radius``. Always consumes the full iteration budget
    (``nodes_expanded`` equals ``iters``); on success, the waypoint chain is
    expanded into an 8-adjacent cell path and re-priced geometrically.
    Deterministic for a fixed seed.
    """
    if not bm.in_bounds(start) or not bm.in_bounds(goal):
        raise ValueError(f"endpoints {start}->{goal} outside {bm.height}x{bm.width} map")
    if not bm.is_free(start) or not bm.is_free(goal) or start == goal:
        return PlanResult(nodes_expanded=iters, succeeded=False)
    rng = random.Random(rng_seed)
    free_r, free_c = np.nonzero(bm.free)
    n_free = free_r.shape[0]
    cap = iters + 2
    xs = np.empty(cap, dtype=np.float64)
    ys = np.empty(cap, dtype=np.float64)
    nodes: list[Cell] = [start]
    xs[0], ys[0] = start
    parents = [-1]
    costs = [0.0]
    index_of = {start: 0}
    goal_idx = -1
    r2 = float(radius * radius)

    for _ in range(iters):
        if rng.random() < 0.05:
            sample = goal
        else:
            k = rng.randrange(n_free)
            sample = (int(free_r[k]), int(free_c[k]))
        m = len(nodes)
        d2 = (xs[:m] - sample[0]) ** 2 + (ys[:m] - sample[1]) ** 2
        nearest = int(np.argmin(d2))
        npos = nodes[nearest]
        dist = math.sqrt(float(d2[nearest]))
        if dist == 0.0:
            continue
        if dist <= step:
            new = sample
        else:
            scale = step / dist
            new = (
                npos[0] + round((sample[0] - npos[0]) * scale),
                npos[1] + round((sample[1] - npos[1]) * scale),
            )
        if new in index_of or not bm.is_free(new):
            continue
        if not _segment_free(bm, npos, new):
            continue
        # Choose the cheapest collision-free parent within the rewire radius.
        d2n = (xs[:m] - new[0]) ** 2 + (ys[:m] - new[1]) ** 2
        near = np.nonzero(d2n <= r2)[0]
        best_parent = nearest
        best_cost = costs[nearest] + euclid(npos, new)
        for i in near.tolist():
            cand = costs[i] + math.sqrt(float(d2n[i]))
            if cand < best_cost and _segment_free(bm, nodes[i], new):
                best_cost = cand
                best_parent = i
        idx = len(nodes)
        nodes.append(new)
        xs[idx], ys[idx] = new
        parents.append(best_parent)
        costs.append(best_cost)
        index_of[new] = idx
        # Rewire neighbors through the new node when that is cheaper.
        for i in near.tolist():
            seg = math.sqrt(float(d2n[i]))
            cand = best_cost + seg
            if cand < costs[i] and _segment_free(bm, new, nodes[i]):
                parents[i] = idx
                costs[i] = cand
        # Try to connect the goal whenever the new node lands within one step.
        if new == goal:
            if goal_idx < 0:
                goal_idx = idx
            continue
        gd = euclid(new, goal)
        if gd <= step and _segment_free(bm, new, goal):
            cand = best_cost + gd
            if goal_idx < 0:
                goal_idx = len(nodes)
                nodes.append(goal)
                xs[goal_idx], ys[goal_idx] = goal
                parents.append(idx)
                costs.append(cand)
                index_of[goal] = goal_idx
            elif cand < costs[goal_idx]:
                parents[goal_idx] = idx
                costs[goal_idx] = cand

    if goal_idx < 0:
        return PlanResult(nodes_expanded=iters, succeeded=False)
    waypoints = [goal]
    i = goal_idx
    while parents[i] >= 0:
        i = parents[i]
        waypoints.append(nodes[i])
    waypoints.reverse()
    path: list[Cell] = [start]
    for a, b in zip(waypoints, waypoints[1:]):
        path.extend(bresenham_line(a, b)[1:])
    return PlanResult(
        path=path,
        cost=_cells_path_cost(path),
        nodes_expanded=iters,
        succeeded=True,
    )


# ---------------------------------------------------------------------------
# Navigating baselines


class _DStarLiteBinaryPlanner:
    """Plain D*-lite on the thresholded known map with Euclidean heuristic."""

    supports_reset = False
    gamma = None

    def __init__(self, known: ProbGrid, goal: Cell, params: PlannerParams):
        self.known = known
        self.goal = goal
        self.tau = params.threshold
        self.bin01 = np.where(known.probs >= self.tau, 1.0, 0.0)
        self.core: DStarLite | None = None
        self.replans = 0

    def initialize(self, pos: Cell) -> bool:
        self.core = DStarLite(self.bin01, self.goal, pos, 0.0, euclid)
        self.core.seed_canonical()
        return True

    def on_changes(self, cells, pos: Cell) -> None:
        flips = []
        for r, c in cells:
            newbin = 1.0 if self.known.probs[r, c] >= self.tau else 0.0
            if self.bin01[r, c] != newbin:
                self.bin01[r, c] = newbin
                flips.append((r, c))
        if flips:
            self.replans += 1
            self.core.apply_changes(flips, pos)

    def compute(self, pos: Cell) -> bool:
        self.core.compute_shortest_path(pos)
        return self.core.g_of(pos) < INF

    def next_step(self, pos: Cell) -> Cell | None:
        return self.core.choose_step(pos)

    @property
    def expansions(self) -> int:
        return self.core.expansions if self.core is not None else 0


def d_star_lite_navigate(
    grid: ProbGrid,
    gt: GroundTruthMask,
    start: Cell,
    goal: Cell,
    params: PlannerParams | None = None,
    *,
    trace=None,
    step_hook=None,
) -> NavResult:
    """Navigate with plain D*-lite over the thresholded known map.

    Shares the scan/reveal machinery with the uncertainty-aware replanner;
    only cells whose binary state flips at the confidence cutoff trigger
    vertex updates.
    """
    params = params or PlannerParams()
    known = grid.floored()
    planner = _DStarLiteBinaryPlanner(known, goal, params)
    return _run_navigation(known, gt, start, goal, params, planner, trace, step_hook)


class _RraPlanner:
    """Full A* re-run from the current cell whenever a reveal blocks a cell
    on the remaining route; otherwise just follow the route."""

    supports_reset = False
    gamma = None

    def __init__(self, known: ProbGrid, goal: Cell, params: PlannerParams):
        self.known = known
        self.goal = goal
        self.tau = params.threshold
        self.free = known.probs >= self.tau
        self.route: list[Cell] | None = None
        self.route_pos = 0
        self.remaining: set[Cell] = set()
        self.invalid = False
        self.plan_calls = 0
        self.expansions = 0

    def _replan(self, pos: Cell) -> bool:
        result = a_star(BinaryMap(self.free), pos, self.goal)
        self.plan_calls += 1
        self.expansions += result.nodes_expanded
        if not result.succeeded:
            self.route = None
            return False
        self.route = result.path
        self.route_pos = 0
        self.remaining = set(result.path)
        self.invalid = False
        return True

    def initialize(self, pos: Cell) -> bool:
        return self._replan(pos)

    def on_changes(self, cells, pos: Cell) -> None:
        for r, c in cells:
            newfree = self.known.probs[r, c] >= self.tau
            self.free[r, c] = newfree
            if not newfree and (r, c) in self.remaining:
                self.invalid = True

    def compute(self, pos: Cell) -> bool:
        if self.route is not None and not self.invalid:
            i = self.route_pos
            if self.route[i] == pos:
                return True
            if i + 1 < len(self.route) and self.route[i + 1] == pos:
                self.route_pos = i + 1
                self.remaining.discard(self.route[i])
                return True
        return self._replan(pos)

    def next_step(self, pos: Cell) -> Cell | None:
        i = self.route_pos
        if self.route is None or self.route[i] != pos or i + 1 >= len(self.route):
            return None
        return self.route[i + 1]

    @property
    def replans(self) -> int:
        return max(0, self.plan_calls - 1)


def rra_star_navigate(
    grid: ProbGrid,
    gt: GroundTruthMask,
    start: Cell,
    goal: Cell,
    params: PlannerParams | None = None,
    *,
    trace=None,
    step_hook=None,
) -> NavResult:
    """Navigate by replanning a thresholded A* route whenever a reveal
    invalidates it."""
    params = params or PlannerParams()
    known = grid.floored()
    planner = _RraPlanner(known, goal, params)
    return _run_navigation(known, gt, start, goal, params, planner, trace, step_hook)
