"""URD*: incremental replanning while a simulated robot drives and senses.

The replanner keeps a backward search tree (g estimates cost-to-goal,
rhs the one-step lookahead) with two-component queue keys and a key
modifier that stays valid as the robot moves, in the style of incremental
lifelong search. The tree is seeded from an initial URA* plan instead of
from scratch; a custom start-anchored heuristic focuses repair work, and
when the robot stops making progress the tree is reset, re-seeded from the
current position, and the heuristic's gamma multiplier decays toward plain
Euclidean behavior.

The navigation loop is shared by every replanning method so that benchmark
comparisons differ only in planner logic: each iteration recomputes the
route, steps to the best successor, scans a fixed radius with occlusion,
reveals true labels into the known grid, and feeds changed cells back to
the planner.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Cell, GroundTruthMask, ProbGrid, _reveal_arrays, _scan_arrays, euclid
from .search import INF, OFFSETS, SQRT2, PlannerParams
from .ura import UraStar


def urd_heuristic(s_start: Cell, s_goal: Cell, s_current: Cell, gamma: float) -> float:
    """Start-anchored replanning heuristic.

    With d_x/d_y the per-axis offsets from the start and u the ratio of the
    start-to-cell distance over the start-to-goal distance, the raw value is
    ``u * (gamma * min(d_x, d_y) + |d_x - d_y|)``; the result is capped at
    the start-to-cell Euclidean distance, which keeps it a lower bound on
    travel cost from the start.
    """
    d_sg = euclid(s_start, s_goal)
    if d_sg == 0.0:
        return 0.0
    d_x = abs(s_start[0] - s_current[0])
    d_y = abs(s_start[1] - s_current[1])
    d_sc = math.hypot(d_x, d_y)
    u = d_sc / d_sg
    h = u * (gamma * min(d_x, d_y) + abs(d_x - d_y))
    return min(h, d_sc)


class DStarLite:
    """Backward incremental search core over a live cost array.

    ``probs`` is the (height, width) probability array the simulation
    mutates in place; cost changes must be funneled through
    :meth:`apply_changes` so internal caches stay in sync. ``h_fn(anchor,
    cell)`` is the start-anchored heuristic used in queue keys.
    """

    def __init__(self, probs: np.ndarray, goal: Cell, robot: Cell, w_trav: float, h_fn):
        self.arr = probs
        self.h, self.w = probs.shape
        self.goal = goal
        self.w_trav = w_trav
        self.h_fn = h_fn
        n = self.h * self.w
        self.p = probs.ravel().tolist()
        self.g = [INF] * n
        self.rhs = [INF] * n
        self.km = 0.0
        self._last_anchor = robot
        self._last_compute_anchor = robot
        self._keys: dict[int, tuple[float, float]] = {}
        self._heap: list[tuple[float, float, int]] = []
        self.expansions = 0

    # -- seeding ----------------------------------------------------------

    def seed_canonical(self) -> None:
        """Fresh tree: only the goal is queued."""
        gi = self.goal[0] * self.w + self.goal[1]
        self.rhs[gi] = 0.0
        key = self._calc_key(gi, self._last_anchor)
        self._keys[gi] = key
        self._heap = [(key[0], key[1], gi)]

    def seed_from_path(self, path: list[Cell]) -> None:
        """Warm-start the tree from a robot-to-goal path.

        Path cells get g equal to their suffix cost along the path (an upper
        bound on the true cost-to-goal); rhs is recomputed everywhere from
        those g values and every inconsistent cell is queued, which is a
        valid search state that the repair loop refines on demand.
        """
        h, w = self.h, self.w
        wtrav = self.w_trav
        g2 = np.full((h, w), INF)
        suffix = 0.0
        g2[path[-1][0], path[-1][1]] = 0.0
        for a, b in zip(reversed(path[:-1]), reversed(path[1:])):
            pb = self.arr[b[0], b[1]]
            step = SQRT2 if (a[0] != b[0] and a[1] != b[1]) else 1.0
            suffix += step + wtrav * (1.0 - pb)
            g2[a[0], a[1]] = suffix
        rhs2 = np.full((h, w), INF)
        probs = self.arr
        for dr, dc, step in OFFSETS:
            # Successor value seen from each cell: cost into the shifted
            # neighbor plus that neighbor's g.
            shifted_g = np.full((h, w), INF)
            shifted_p = np.zeros((h, w))
            src_r = slice(max(dr, 0), h + min(dr, 0))
            src_c = slice(max(dc, 0), w + min(dc, 0))
            dst_r = slice(max(-dr, 0), h + min(-dr, 0))
            dst_c = slice(max(-dc, 0), w + min(-dc, 0))
            shifted_g[dst_r, dst_c] = g2[src_r, src_c]
            shifted_p[dst_r, dst_c] = probs[src_r, src_c]
            cand = step + wtrav * (1.0 - shifted_p) + shifted_g
            cand[shifted_p == 0.0] = INF
            np.minimum(rhs2, cand, out=rhs2)
        rhs2[self.goal[0], self.goal[1]] = 0.0
        self.g = g2.ravel().tolist()
        self.rhs = rhs2.ravel().tolist()
        self.km = 0.0
        self._keys = {}
        heap = []
        anchor = self._last_anchor
        inconsistent = np.nonzero((g2 != rhs2).ravel())[0]
        for idx in inconsistent.tolist():
            key = self._calc_key(idx, anchor)
            self._keys[idx] = key
            heap.append((key[0], key[1], idx))
        heapq.heapify(heap)
        self._heap = heap

    # -- queue machinery ---------------------------------------------------

    def _calc_key(self, idx: int, anchor: Cell) -> tuple[float, float]:
        m = self.rhs[idx] if self.rhs[idx] < self.g[idx] else self.g[idx]
        cell = (idx // self.w, idx % self.w)
        return (m + self.h_fn(anchor, cell) + self.km, m)

    def _update_vertex(self, idx: int, anchor: Cell) -> None:
        gi = self.goal[0] * self.w + self.goal[1]
        if idx != gi:
            r, c = divmod(idx, self.w)
            best = INF
            p = self.p
            g = self.g
            wtrav = self.w_trav
            h, w = self.h, self.w
            for dr, dc, step in OFFSETS:
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w:
                    j = nr * w + nc
                    pj = p[j]
                    if pj == 0.0 or g[j] == INF:
                        continue
                    cand = step + wtrav * (1.0 - pj) + g[j]
                    if cand < best:
                        best = cand
            self.rhs[idx] = best
        self._keys.pop(idx, None)
        if self.g[idx] != self.rhs[idx]:
            key = self._calc_key(idx, anchor)
            self._keys[idx] = key
            heapq.heappush(self._heap, (key[0], key[1], idx))

    def _top(self):
        heap = self._heap
        keys = self._keys
        while heap:
            k1, k2, idx = heap[0]
            if keys.get(idx) == (k1, k2):
                return (k1, k2), idx
            heapq.heappop(heap)
        return None, -1

    # -- core operations ----------------------------------------------------

    def apply_changes(self, cells, robot: Cell) -> None:
        """Ingest cost changes at ``cells`` (their stored probabilities were
        mutated in the live array) and update affected vertices."""
        cells = list(cells)
        if not cells:
            return
        if robot != self._last_anchor:
            self.km += self.h_fn(self._last_anchor, robot)
            self._last_anchor = robot
        w = self.w
        h = self.h
        arr = self.arr
        p = self.p
        touched: set[int] = set()
        for r, c in cells:
            idx = r * w + c
            p[idx] = float(arr[r, c])
            # Entering this cell changed price, so every predecessor's rhs
            # may be stale.
            for dr, dc, _ in OFFSETS:
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w:
                    touched.add(nr * w + nc)
        for idx in touched:
            self._update_vertex(idx, robot)

    def _rekey(self, robot: Cell) -> None:
        """Recompute every queued key against the current anchor.

        The key modifier alone keeps old keys valid only when the heuristic
        satisfies the triangle inequality across robot moves; the start-
        anchored replanning heuristic does not, and stale-high keys would let
        the repair loop terminate early on wrong values. Refreshing costs one
        heapify and restores the admissibility-based termination guarantee.
        """
        heap = []
        for idx in self._keys:
            key = self._calc_key(idx, robot)
            self._keys[idx] = key
            heap.append((key[0], key[1], idx))
        heapq.heapify(heap)
        self._heap = heap

    def compute_shortest_path(self, robot: Cell) -> int:
        """Repair the tree until the robot's cell is consistent and no queued
        key precedes it. Returns the number of vertex expansions performed."""
        w = self.w
        ri = robot[0] * w + robot[1]
        if robot != self._last_compute_anchor:
            self._rekey(robot)
            self._last_compute_anchor = robot
        g = self.g
        rhs = self.rhs
        expanded = 0
        while True:
            top_key, u = self._top()
            r_key = self._calc_key(ri, robot)
            if top_key is None or (top_key >= r_key and rhs[ri] == g[ri]):
                break
            heapq.heappop(self._heap)
            del self._keys[u]
            k_new = self._calc_key(u, robot)
            if top_key < k_new:
                self._keys[u] = k_new
                heapq.heappush(self._heap, (k_new[0], k_new[1], u))
                continue
            r, c = divmod(u, w)
            expanded += 1
            if g[u] > rhs[u]:
                g[u] = rhs[u]
                for dr, dc, _ in OFFSETS:
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < self.h and 0 <= nc < w:
                        self._update_vertex(nr * w + nc, robot)
            else:
                g[u] = INF
                self._update_vertex(u, robot)
                for dr, dc, _ in OFFSETS:
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < self.h and 0 <= nc < w:
                        self._update_vertex(nr * w + nc, robot)
        self.expansions += expanded
        return expanded

    def g_of(self, cell: Cell) -> float:
        return self.g[cell[0] * self.w + cell[1]]

    def choose_step(self, cell: Cell) -> Cell | None:
        """Best successor by edge cost plus cost-to-goal; ties take the
        lowest (row, col). None when every successor is impassable or
        unreachable."""
        r, c = cell
        best = INF
        best_cell: Cell | None = None
        p = self.p
        g = self.g
        w = self.w
        wtrav = self.w_trav
        for dr, dc, step in OFFSETS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < self.h and 0 <= nc < w:
                j = nr * w + nc
                pj = p[j]
                if pj == 0.0 or g[j] == INF:
                    continue
                cand = step + wtrav * (1.0 - pj) + g[j]
                if cand < best:
                    best = cand
                    best_cell = (nr, nc)
        return best_cell

    def route_from(self, cell: Cell, limit: int | None = None) -> list[Cell] | None:
        """Greedy successor chain to the goal, or None if it dead-ends/loops."""
        limit = limit if limit is not None else self.h * self.w + 1
        route = [cell]
        seen = {cell}
        cur = cell
        while cur != self.goal:
            if len(route) > limit:
                return None
            nxt = self.choose_step(cur)
            if nxt is None or nxt in seen:
                return None
            route.append(nxt)
            seen.add(nxt)
            cur = nxt
        return route


@dataclass
class NavResult:
    """Outcome of one simulated navigation session.

    ``nodes_expanded`` counts replanning expansions only (tree-seeding
    searches are excluded); ``replans`` counts the method's own replanning
    events (vertex-update rounds for incremental planners, re-planning calls
    for route-following ones). When the outcome is ``reached`` the
    trajectory starts at the start cell, ends at the goal, consecutive cells
    are 8-adjacent, and every traversed cell is truly traversable.
    """

    traversed_path: list[Cell] = field(default_factory=list)
    replans: int = 0
    resets: int = 0
    nodes_expanded: int = 0
    outcome: str = "fail"  # "reached" or "fail"


class UrdPlanner:
    """Replanner state for the navigation loop: a D*-lite-style core seeded
    by URA*, with stall resets and gamma decay."""

    supports_reset = True

    def __init__(self, known: ProbGrid, goal: Cell, params: PlannerParams, heuristic: str = "urd"):
        self.known = known
        self.goal = goal
        self.params = params
        self.heuristic = heuristic
        self.gamma = params.gamma_init
        self.core: DStarLite | None = None
        self.seed_nodes_expanded = 0
        self.replans = 0

    def _h_fn(self):
        if self.heuristic == "euclid":
            return euclid
        if self.heuristic == "euclid-goal":
            goal = self.goal
            return lambda _anchor, cell: euclid(goal, cell)
        goal = self.goal
        gamma = self.gamma
        return lambda anchor, cell: urd_heuristic(anchor, goal, cell, gamma)

    def _seed(self, pos: Cell) -> bool:
        seed = UraStar(self.known, pos, self.goal, self.params)
        result = seed.plan()
        self.seed_nodes_expanded += result.nodes_expanded
        if not result.succeeded:
            return False
        prev = self.core.expansions if self.core is not None else 0
        self.core = DStarLite(self.known.probs, self.goal, pos, self.params.w_trav, self._h_fn())
        self.core.expansions = prev
        self.core.seed_from_path(result.path)
        return True

    def initialize(self, pos: Cell) -> bool:
        return self._seed(pos)

    def reset(self, pos: Cell) -> bool:
        self.gamma *= self.params.gamma_decay
        return self._seed(pos)

    def on_changes(self, cells, pos: Cell) -> None:
        if cells:
            self.replans += 1
            self.core.apply_changes(cells, pos)

    def compute(self, pos: Cell) -> bool:
        self.core.compute_shortest_path(pos)
        return self.core.g_of(pos) < INF

    def next_step(self, pos: Cell) -> Cell | None:
        return self.core.choose_step(pos)

    @property
    def expansions(self) -> int:
        return self.core.expansions if self.core is not None else 0


def reset_tree(planner: UrdPlanner, pos: Cell) -> bool:
    """Discard the planner's search tree, decay gamma, and re-seed from
    ``pos`` on the current known grid."""
    return planner.reset(pos)


def _run_navigation(
    known: ProbGrid,
    gt: GroundTruthMask,
    start: Cell,
    goal: Cell,
    params: PlannerParams,
    planner,
    trace=None,
    step_hook=None,
) -> NavResult:
    """Drive a simulated robot from start to goal with the given planner.

    Shared by every replanning method: scan/reveal, step validation, stall
    detection, tracing, and accounting live here so methods differ only in
    planner logic. ``known`` is mutated in place by revelation and must be
    owned by this navigation session.
    """
    if known.shape != gt.shape:
        raise ValueError(f"known grid {known.shape} and ground truth {gt.shape} differ")
    if not gt.in_bounds(start) or not gt.in_bounds(goal):
        raise ValueError(f"endpoints {start}->{goal} outside {gt.height}x{gt.width} grid")
    if not gt.traversable(start) or not gt.traversable(goal):
        raise ValueError("start and goal must be traversable in the ground truth")

    result = NavResult(traversed_path=[start])
    if start == goal:
        result.outcome = "reached"
        return result

    radius = params.scan_radius
    max_steps = params.max_steps if params.max_steps is not None else 2 * gt.height * gt.width + 100
    close = False
    if isinstance(trace, (str, bytes)) or hasattr(trace, "__fspath__"):
        trace = open(trace, "w")
        close = True

    def sense(pos: Cell) -> list[Cell]:
        rows, cols, labels = _scan_arrays(pos, radius, gt)
        chr_, chc = _reveal_arrays(known, rows, cols, labels)
        return list(zip(chr_.tolist(), chc.tolist()))

    try:
        pos = start
        # Sense before the first plan so the tree is seeded on the
        # post-scan known grid; no separate change notification is needed.
        changed = sense(pos)
        if not planner.initialize(pos):
            return result
        stall = 0
        visits = {start: 1}
        step = 0
        while pos != goal:
            if step >= max_steps:
                return result
            before = planner.expansions
            if not planner.compute(pos):
                return result
            if step_hook is not None:
                step_hook(step=step, pos=pos, changed=len(changed), planner=planner)
            nxt = planner.next_step(pos)
            if nxt is None:
                return result
            step += 1
            if gt.traversable(nxt):
                # The step rule only offers finite-cost successors, so a
                # revealed block can never be entered.
                assert known.probs[nxt[0], nxt[1]] != 0.0
                pos = nxt
                result.traversed_path.append(pos)
                visits[pos] = visits.get(pos, 0) + 1
                stall = 0
                changed = sense(pos)
            else:
                # Contact before the scan could cover the cell (diagonal at
                # radius 1): reveal just that cell and stay put.
                known.probs[nxt[0], nxt[1]] = 0.0
                changed = [nxt]
                stall += 1
            if changed:
                planner.on_changes(changed, pos)
            stuck = stall >= params.stall_limit or visits.get(pos, 0) > 4
            if stuck and planner.supports_reset:
                stall = 0
                visits = {pos: 1}
                result.resets += 1
                if not planner.reset(pos):
                    return result
            if trace is not None:
                trace.write(
                    json.dumps(
                        {
                            "step": step,
                            "pos": [pos[0], pos[1]],
                            "changed": len(changed),
                            "expansions": planner.expansions - before,
                            "gamma": getattr(planner, "gamma", None),
                        }
                    )
                    + "\n"
                )
        result.outcome = "reached"
        return result
    finally:
        result.nodes_expanded = planner.expansions
        result.replans = getattr(planner, "replans", 0)
        if close:
            trace.close()


def urd_navigate(
    grid: ProbGrid,
    gt: GroundTruthMask,
    start: Cell,
    goal: Cell,
    params: PlannerParams | None = None,
    *,
    heuristic: str = "urd",
    trace=None,
    step_hook=None,
) -> NavResult:
    """Navigate with the uncertainty-aware replanner.

    ``grid`` is the model's probability map; a floored private copy becomes
    the session's known grid, so the caller's grid is never mutated.
    ``heuristic`` may be "urd" (default), "euclid", or "euclid-goal" (an
    ablation that anchors the heuristic at the goal instead of the robot).
    """
    params = params or PlannerParams()
    if heuristic not in ("urd", "euclid", "euclid-goal"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    known = grid.floored()
    planner = UrdPlanner(known, goal, params, heuristic)
    return _run_navigation(known, gt, start, goal, params, planner, trace, step_hook)
