"""URA*: anytime planning over traversal-probability grids.

Runs a weighted best-first search repeatedly while lowering the inflation
factor epsilon toward 1, reusing search effort between rounds. Node priority
is ``g(s) + epsilon * (dist(s, goal) - alpha * M(s))``, so cells that are
probably free and close to the goal are preferred; the probability term can
make the heuristic inadmissible (and f-values negative), which is accepted
by design. Visiting a cell costs its geometric step length plus
``w_trav * (1 - M(s))``.

With ``alpha = 0`` the heuristic is plain Euclidean distance and each
round's incumbent is at most epsilon times the optimal composite cost.
"""

from __future__ import annotations

import heapq

import numpy as np

from .grid import Cell, ProbGrid, euclid
from .search import INF, OFFSETS, PlannerParams, PlanResult, _reconstruct


def ura_f_value(
    g_s: float, s: Cell, goal: Cell, grid: ProbGrid, eps: float, alpha: float
) -> float:
    """Queue priority of state ``s``: g + eps * (dist-to-goal - alpha * M(s))."""
    return g_s + eps * (euclid(s, goal) - alpha * float(grid.probs[s[0], s[1]]))


class UraStar:
    """Anytime planner instance for one (grid, start, goal) query.

    Not shareable mid-search; distinct instances may run concurrently over
    shared read-only grids. ``history`` records the (epsilon, incumbent cost)
    pair after each completed improvement round.
    """

    def __init__(self, grid: ProbGrid, start: Cell, goal: Cell, params: PlannerParams | None = None):
        self.params = params or PlannerParams()
        if not grid.in_bounds(start) or not grid.in_bounds(goal):
            raise ValueError(
                f"endpoints {start}->{goal} outside {grid.height}x{grid.width} grid"
            )
        self.grid = grid
        self.start = start
        self.goal = goal
        h, w = grid.shape
        self._h = h
        self._w = w
        self._n = h * w
        self._p = grid.probs.ravel().tolist()
        rows, cols = np.indices((h, w))
        self._dist = np.hypot(rows - goal[0], cols - goal[1]).ravel().tolist()
        self.nodes_expanded = 0
        self.history: list[tuple[float, float]] = []
        # Per-cell bookkeeping: g-value, back-pointer, authoritative key, and
        # OPEN/CLOSED/INCONS membership (absent from all three sets = NEW).
        self._g = [INF] * self._n
        self._parent = [-1] * self._n
        self._key = [0.0] * self._n
        self._open: set[int] = set()
        self._closed: set[int] = set()
        self._incons: set[int] = set()
        self._heap: list[tuple[float, int]] = []

    def _f(self, idx: int, eps: float) -> float:
        alpha = self.params.alpha
        return self._g[idx] + eps * (self._dist[idx] - alpha * self._p[idx])

    def improve_path(self, eps: float) -> int:
        """One weighted search round; expands until the incumbent's f-value
        is no larger than the best queued key. Returns nodes expanded."""
        g = self._g
        p = self._p
        dist = self._dist
        key = self._key
        parent = self._parent
        open_set = self._open
        closed = self._closed
        incons = self._incons
        heap = self._heap
        pop = heapq.heappop
        push = heapq.heappush
        w = self._w
        h = self._h
        alpha = self.params.alpha
        wtrav = self.params.w_trav
        goal_idx = self.goal[0] * w + self.goal[1]
        expanded = 0
        while heap:
            f, idx = heap[0]
            if idx not in open_set or key[idx] != f:
                pop(heap)  # stale entry
                continue
            g_goal = g[goal_idx]
            if g_goal < INF and g_goal + eps * (dist[goal_idx] - alpha * p[goal_idx]) <= f:
                break
            pop(heap)
            open_set.discard(idx)
            closed.add(idx)
            expanded += 1
            gs = g[idx]
            r, c = divmod(idx, w)
            for dr, dc, step in OFFSETS:
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w:
                    j = nr * w + nc
                    pj = p[j]
                    if pj == 0.0:
                        continue
                    ng = gs + step + wtrav * (1.0 - pj)
                    if ng < g[j]:
                        g[j] = ng
                        parent[j] = idx
                        if j in closed:
                            incons.add(j)
                        else:
                            fj = ng + eps * (dist[j] - alpha * pj)
                            key[j] = fj
                            open_set.add(j)
                            push(heap, (fj, j))
        self.nodes_expanded += expanded
        return expanded

    def _rebuild_open(self, eps: float) -> None:
        """Merge INCONS into OPEN and re-key every queued state for ``eps``."""
        self._open |= self._incons
        self._incons.clear()
        self._closed.clear()
        heap = []
        for idx in self._open:
            f = self._f(idx, eps)
            self._key[idx] = f
            heap.append((f, idx))
        heapq.heapify(heap)
        self._heap = heap

    def _incumbent(self) -> PlanResult:
        goal_idx = self.goal[0] * self._w + self.goal[1]
        if self._g[goal_idx] == INF:
            return PlanResult(nodes_expanded=self.nodes_expanded, succeeded=False)
        return PlanResult(
            path=_reconstruct(self._parent, goal_idx, self._w),
            cost=self._g[goal_idx],
            nodes_expanded=self.nodes_expanded,
            succeeded=True,
            epsilon_final=self.history[-1][0] if self.history else self.params.epsilon_init,
        )

    def plan(self) -> PlanResult:
        """Run the full epsilon schedule down to 1 and return the final plan."""
        if self.start == self.goal:
            return PlanResult(path=[self.start], cost=0.0, nodes_expanded=0, succeeded=True)
        s_idx = self.start[0] * self._w + self.start[1]
        goal_idx = self.goal[0] * self._w + self.goal[1]
        eps = self.params.epsilon_init
        self._g[s_idx] = 0.0
        f0 = self._f(s_idx, eps)
        self._key[s_idx] = f0
        self._open.add(s_idx)
        self._heap = [(f0, s_idx)]
        self.improve_path(eps)
        if self._g[goal_idx] < INF:
            self.history.append((eps, self._g[goal_idx]))
        while eps > 1.0:
            eps = max(1.0, eps - self.params.epsilon_step)
            self._rebuild_open(eps)
            self.improve_path(eps)
            if self._g[goal_idx] < INF:
                self.history.append((eps, self._g[goal_idx]))
        result = self._incumbent()
        result.epsilon_final = 1.0
        return result


def ura_star(
    grid: ProbGrid, start: Cell, goal: Cell, params: PlannerParams | None = None
) -> PlanResult:
    """Plan with URA* over ``grid``.

    The grid is used as given; callers planning on raw model output should
    pass ``grid.floored()`` so no cell is hard-blocked, which makes the
    search complete (it always returns a path).
    """
    return UraStar(grid, start, goal, params).plan()
