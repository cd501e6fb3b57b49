"""Shared search scaffolding: neighborhoods, composite edge costs, the
priority-queue contract, and a brute-force optimality oracle.

The composite cost of moving into a neighbor is its geometric step length
(1 orthogonal, sqrt(2) diagonal) plus ``w_trav * (1 - M(dest))``, so low
traversal probability is priced as extra distance. A destination with
probability exactly 0.0 (a revealed block, or a thresholded obstacle) is
impassable.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, fields

from .grid import Cell, ProbGrid

SQRT2 = math.sqrt(2.0)
INF = math.inf

# 8-connected offsets in ascending (row, col) order so that first-wins ties
# in argmin scans match the queue tie-breaking rule.
OFFSETS: tuple[tuple[int, int, float], ...] = (
    (-1, -1, SQRT2),
    (-1, 0, 1.0),
    (-1, 1, SQRT2),
    (0, -1, 1.0),
    (0, 1, 1.0),
    (1, -1, SQRT2),
    (1, 0, 1.0),
    (1, 1, SQRT2),
)


@dataclass(frozen=True)
class PlannerParams:
    """All planner and simulator tunables.

    epsilon_init/epsilon_step: anytime inflation schedule (runs down to 1).
    alpha: probability weight inside the anytime planner's f-value.
    gamma_init/gamma_decay: replanner heuristic multiplier and its per-reset decay.
    w_trav: probability-cost weight in the composite edge cost.
    scan_radius: sensing radius in cells.
    stall_limit: iterations without movement before the replanner resets its tree.
    grid_w/grid_h: working grid size maps are resampled to.
    threshold: confidence cutoff for the binarizing baselines.
    rrt_step/rrt_radius/rrt_iters: sampling-planner step size, rewire radius,
        and iteration budget.
    max_steps: navigation step cap; None means 2*grid_area + 100.
    """

    epsilon_init: float = 2.5
    epsilon_step: float = 0.5
    alpha: float = 1.0
    gamma_init: float = SQRT2
    gamma_decay: float = 0.8
    w_trav: float = 10.0
    scan_radius: int = 30
    stall_limit: int = 3
    grid_w: int = 600
    grid_h: int = 600
    threshold: float = 0.5
    rrt_step: int = 5
    rrt_radius: int = 50
    rrt_iters: int = 10000
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon_init) and self.epsilon_init >= 1.0):
            raise ValueError("epsilon_init must be finite and >= 1")
        if not self.epsilon_step > 0:
            raise ValueError("epsilon_step must be positive")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError("alpha must be finite and non-negative")
        if not self.gamma_init > 0:
            raise ValueError("gamma_init must be positive")
        if not 0 < self.gamma_decay <= 1:
            raise ValueError("gamma_decay must lie in (0, 1]")
        if not (math.isfinite(self.w_trav) and self.w_trav >= 0):
            raise ValueError("w_trav must be finite and non-negative")
        if self.scan_radius < 1:
            raise ValueError("scan_radius must be at least 1")
        if self.stall_limit < 1:
            raise ValueError("stall_limit must be at least 1")
        if self.grid_w < 2 or self.grid_h < 2:
            raise ValueError("grid dimensions must be at least 2")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if self.rrt_step < 1 or self.rrt_radius < 1 or self.rrt_iters < 1:
            raise ValueError("rrt parameters must be positive")


def params_from_dict(overrides: dict | None, base: PlannerParams | None = None) -> PlannerParams:
    """Build params from a JSON-style dict of overrides on top of defaults."""
    base_vals = {f.name: getattr(base, f.name) for f in fields(PlannerParams)} if base else {}
    if overrides:
        known = {f.name for f in fields(PlannerParams)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown planner parameter(s): {sorted(unknown)}")
        base_vals.update(overrides)
    return PlannerParams(**base_vals)


@dataclass
class PlanResult:
    """Outcome of a single planning call.

    On success the path starts at the start cell, ends at the goal, and
    consecutive cells are 8-adjacent; on failure the path is empty and the
    cost infinite.
    """

    path: list[Cell] = field(default_factory=list)
    cost: float = INF
    nodes_expanded: int = 0
    succeeded: bool = False
    epsilon_final: float = 1.0


def neighbors(cell: Cell, height: int, width: int) -> list[tuple[Cell, float]]:
    """In-bounds 8-connected neighbors of ``cell`` with their step lengths."""
    r, c = cell
    out = []
    for dr, dc, step in OFFSETS:
        nr, nc = r + dr, c + dc
        if 0 <= nr < height and 0 <= nc < width:
            out.append(((nr, nc), step))
    return out


def edge_cost(a: Cell, b: Cell, grid: ProbGrid, w_trav: float) -> float:
    """Cost of stepping from ``a`` into adjacent ``b`` on ``grid``.

    Returns step length + w_trav * (1 - M(b)); infinite when M(b) is exactly
    zero (impassable destination).
    """
    p = grid.probs[b[0], b[1]]
    if p == 0.0:
        return INF
    dr = abs(a[0] - b[0])
    dc = abs(a[1] - b[1])
    if dr > 1 or dc > 1 or (dr == 0 and dc == 0):
        raise ValueError(f"{b} is not an 8-neighbor of {a}")
    step = SQRT2 if dr + dc == 2 else 1.0
    return step + w_trav * (1.0 - p)


def path_cost(path: list[Cell], grid: ProbGrid, w_trav: float) -> float:
    """Re-price a cell path edge by edge with :func:`edge_cost`."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        c = edge_cost(a, b, grid, w_trav)
        if c == INF:
            return INF
        total += c
    return total


class EmptyQueueError(RuntimeError):
    """pop/peek on an empty priority queue (a caller contract violation)."""


class PriorityQueue:
    """Min-queue over cells keyed by lexicographic (primary, secondary) pairs.

    Ties on equal keys are broken by lowest (row, col). One authoritative key
    per cell (decrease-key semantics); stale heap entries are dropped lazily.
    Negative key components are fine.
    """

    __slots__ = ("_heap", "_keys")

    def __init__(self) -> None:
        self._heap: list[tuple[float, float, int, int]] = []
        self._keys: dict[Cell, tuple[float, float]] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, cell: Cell) -> bool:
        return cell in self._keys

    def insert(self, key: tuple[float, float], cell: Cell) -> None:
        self._keys[cell] = key
        heapq.heappush(self._heap, (key[0], key[1], cell[0], cell[1]))

    def update(self, key: tuple[float, float], cell: Cell) -> None:
        if cell not in self._keys:
            raise KeyError(f"cannot update key of absent cell {cell}")
        self.insert(key, cell)

    def remove(self, cell: Cell) -> None:
        self._keys.pop(cell, None)

    def _prune(self) -> None:
        heap = self._heap
        keys = self._keys
        while heap:
            k1, k2, r, c = heap[0]
            if keys.get((r, c)) == (k1, k2):
                return
            heapq.heappop(heap)
        if not keys:
            return
        # Rebuild if every heap entry went stale while cells remain.
        self._heap = [(k[0], k[1], cell[0], cell[1]) for cell, k in keys.items()]
        heapq.heapify(self._heap)

    def peek_min_key(self) -> tuple[float, float]:
        self._prune()
        if not self._keys:
            raise EmptyQueueError("peek on empty priority queue")
        k1, k2, _, _ = self._heap[0]
        return (k1, k2)

    def pop_min(self) -> Cell:
        self._prune()
        if not self._keys:
            raise EmptyQueueError("pop on empty priority queue")
        _, _, r, c = heapq.heappop(self._heap)
        del self._keys[(r, c)]
        return (r, c)


def _reconstruct(parent: list[int], end: int, width: int) -> list[Cell]:
    idxs = [end]
    while parent[idxs[-1]] >= 0:
        idxs.append(parent[idxs[-1]])
    idxs.reverse()
    return [(i // width, i % width) for i in idxs]


def dijkstra_oracle(grid: ProbGrid, start: Cell, goal: Cell, w_trav: float = 10.0) -> PlanResult:
    """Exact minimum-cost path under the composite edge cost.

    Test oracle and reference row for benchmarks; deterministic ties
    (lowest (row, col) first).
    """
    h, w = grid.shape
    if not grid.in_bounds(start) or not grid.in_bounds(goal):
        raise ValueError(f"endpoints {start}->{goal} outside {h}x{w} grid")
    p = grid.probs.ravel().tolist()
    n = h * w
    g = [INF] * n
    parent = [-1] * n
    done = bytearray(n)
    s_idx = start[0] * w + start[1]
    t_idx = goal[0] * w + goal[1]
    g[s_idx] = 0.0
    heap: list[tuple[float, int]] = [(0.0, s_idx)]
    push = heapq.heappush
    pop = heapq.heappop
    expanded = 0
    while heap:
        dist, idx = pop(heap)
        if done[idx] or dist != g[idx]:
            continue
        done[idx] = 1
        expanded += 1
        if idx == t_idx:
            break
        r, c = divmod(idx, w)
        gs = g[idx]
        for dr, dc, step in OFFSETS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w:
                j = nr * w + nc
                if done[j]:
                    continue
                pj = p[j]
                if pj == 0.0:
                    continue
                ng = gs + step + w_trav * (1.0 - pj)
                if ng < g[j]:
                    g[j] = ng
                    parent[j] = idx
                    push(heap, (ng, j))
    if g[t_idx] == INF:
        return PlanResult(nodes_expanded=expanded, succeeded=False)
    return PlanResult(
        path=_reconstruct(parent, t_idx, w),
        cost=g[t_idx],
        nodes_expanded=expanded,
        succeeded=True,
    )
