"""Shared test utilities: independent oracles and fixture worlds.

The oracles here are written from scratch against the definitions (not the
library's search code paths) so they stay meaningful as checks.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from probnav import GroundTruthMask, ProbGrid

SQRT2 = math.sqrt(2.0)


def random_grid(rng, height, width, floor=1e-6) -> ProbGrid:
    """Uniform random probability grid with the planning floor applied."""
    return ProbGrid(np.clip(rng.uniform(0.0, 1.0, size=(height, width)), floor, 1.0))


def reference_astar_cost(probs: np.ndarray, start, goal, w_trav: float) -> float:
    """Plain textbook A* (Euclidean heuristic) over the composite cost.

    Independent implementation used to cross-check planners; returns inf
    when the goal is unreachable.
    """
    h, w = probs.shape
    g = {start: 0.0}
    closed = set()
    heap = [(math.hypot(start[0] - goal[0], start[1] - goal[1]), start)]
    while heap:
        f, cell = heapq.heappop(heap)
        if cell in closed:
            continue
        closed.add(cell)
        if cell == goal:
            return g[cell]
        r, c = cell
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                nr, nc = r + dr, c + dc
                if not (0 <= nr < h and 0 <= nc < w):
                    continue
                p = probs[nr, nc]
                if p == 0.0:
                    continue
                step = SQRT2 if dr != 0 and dc != 0 else 1.0
                ng = g[cell] + step + w_trav * (1.0 - p)
                if ng < g.get((nr, nc), math.inf):
                    g[(nr, nc)] = ng
                    heapq.heappush(
                        heap, (ng + math.hypot(nr - goal[0], nc - goal[1]), (nr, nc))
                    )
    return math.inf


def exhaustive_best_cost(probs: np.ndarray, start, goal, w_trav: float) -> float:
    """Branch-and-bound enumeration of all simple paths (tiny grids only)."""
    h, w = probs.shape
    best = [math.inf]
    visited = {start}

    def dfs(cell, cost):
        if cost >= best[0]:
            return
        if cell == goal:
            best[0] = cost
            return
        r, c = cell
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                nr, nc = r + dr, c + dc
                if not (0 <= nr < h and 0 <= nc < w) or (nr, nc) in visited:
                    continue
                p = probs[nr, nc]
                if p == 0.0:
                    continue
                step = SQRT2 if dr != 0 and dc != 0 else 1.0
                visited.add((nr, nc))
                dfs((nr, nc), cost + step + w_trav * (1.0 - p))
                visited.discard((nr, nc))

    dfs(start, 0.0)
    return best[0]


def assert_valid_path(path, start, goal):
    """Endpoint and 8-adjacency checks shared across planner tests."""
    assert path[0] == start
    assert path[-1] == goal
    for a, b in zip(path, path[1:]):
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1, f"{a} -> {b} not 8-adjacent"


def corridor_world(gap_col_real=13, gap_col_model=5):
    """15x15 fixture: a wall the model is wrong about.

    Ground truth has its only gap at ``gap_col_real``; the probability map
    instead advertises a gap at ``gap_col_model``. Start above the wall,
    goal below.
    """
    gt = np.ones((15, 15), dtype=bool)
    gt[7, :] = False
    gt[7, gap_col_real] = True
    m = np.full((15, 15), 0.9)
    m[7, :] = 0.1
    m[7, gap_col_model] = 0.9
    return ProbGrid(m), GroundTruthMask(gt), (2, 5), (12, 5)
