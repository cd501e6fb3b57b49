"""Search scaffolding: params, neighborhoods, edge costs, queue, oracle."""

import math

import numpy as np
import pytest

from probnav import (
    EmptyQueueError,
    PlannerParams,
    PriorityQueue,
    ProbGrid,
    dijkstra_oracle,
    edge_cost,
    neighbors,
    path_cost,
)

from helpers import assert_valid_path, exhaustive_best_cost, random_grid

SQRT2 = math.sqrt(2.0)


class TestPlannerParams:
    def test_defaults_valid(self):
        p = PlannerParams()
        assert p.epsilon_init == 2.5
        assert p.w_trav == 10.0
        assert p.grid_w == p.grid_h == 600

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon_init": 0.5},
            {"epsilon_step": 0.0},
            {"alpha": -1.0},
            {"gamma_init": 0.0},
            {"gamma_decay": 1.5},
            {"w_trav": float("inf")},
            {"scan_radius": 0},
            {"stall_limit": 0},
            {"grid_w": 1},
            {"threshold": 1.0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            PlannerParams(**kwargs)


class TestNeighbors:
    def test_interior_has_eight(self):
        out = neighbors((3, 3), 10, 10)
        assert len(out) == 8

    def test_corner_has_three(self):
        out = neighbors((0, 0), 10, 10)
        assert sorted(c for c, _ in out) == [(0, 1), (1, 0), (1, 1)]

    def test_diagonal_distance(self):
        dists = {c: d for c, d in neighbors((3, 3), 10, 10)}
        assert dists[(4, 4)] == pytest.approx(1.4142135623730951)
        assert dists[(3, 4)] == 1.0

    def test_never_out_of_bounds(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            h, w = int(rng.integers(2, 12)), int(rng.integers(2, 12))
            cell = (int(rng.integers(h)), int(rng.integers(w)))
            for (r, c), _ in neighbors(cell, h, w):
                assert 0 <= r < h and 0 <= c < w


class TestEdgeCost:
    def test_orthogonal_into_certain_cell(self):
        g = ProbGrid(np.ones((3, 3)))
        assert edge_cost((0, 0), (0, 1), g, 123.0) == 1.0

    def test_diagonal_formula(self):
        g = ProbGrid(np.full((3, 3), 0.5))
        assert edge_cost((0, 0), (1, 1), g, 10.0) == pytest.approx(SQRT2 + 5.0)

    def test_revealed_block_is_infinite(self):
        arr = np.full((3, 3), 0.5)
        arr[1, 1] = 0.0
        g = ProbGrid(arr)
        assert edge_cost((0, 0), (1, 1), g, 10.0) == math.inf

    def test_step_component_symmetric(self):
        g = ProbGrid(np.ones((3, 3)))  # no penalty term at M=1
        for b in [(0, 1), (1, 0), (1, 1)]:
            assert edge_cost((0, 0), b, g, 5.0) == edge_cost(b, (0, 0), g, 5.0)

    def test_penalty_depends_on_destination(self):
        arr = np.ones((3, 3))
        arr[1, 1] = 0.4
        g = ProbGrid(arr)
        assert edge_cost((0, 0), (1, 1), g, 10.0) == pytest.approx(SQRT2 + 6.0)
        assert edge_cost((1, 1), (0, 0), g, 10.0) == pytest.approx(SQRT2)

    def test_non_adjacent_rejected(self):
        g = ProbGrid(np.ones((4, 4)))
        with pytest.raises(ValueError):
            edge_cost((0, 0), (0, 2), g, 1.0)


class TestPriorityQueue:
    def test_basic_order(self):
        q = PriorityQueue()
        q.insert((1.0, 0.0), (0, 0))
        q.insert((2.0, 0.0), (0, 1))
        assert q.peek_min_key() == (1.0, 0.0)
        assert q.pop_min() == (0, 0)

    def test_lexicographic_secondary(self):
        q = PriorityQueue()
        q.insert((1.0, 5.0), (0, 0))
        q.insert((1.0, 2.0), (0, 1))
        assert q.pop_min() == (0, 1)

    def test_cell_tiebreak(self):
        q = PriorityQueue()
        q.insert((1.0, 1.0), (5, 5))
        q.insert((1.0, 1.0), (5, 2))
        q.insert((1.0, 1.0), (2, 9))
        assert q.pop_min() == (2, 9)
        assert q.pop_min() == (5, 2)

    def test_negative_keys(self):
        q = PriorityQueue()
        q.insert((0.0, 0.0), (0, 0))
        q.insert((-3.5, 0.0), (0, 1))
        assert q.pop_min() == (0, 1)

    def test_update_decrease_key(self):
        q = PriorityQueue()
        q.insert((9.0, 0.0), (1, 1))
        q.insert((5.0, 0.0), (2, 2))
        q.update((1.0, 0.0), (1, 1))
        assert q.pop_min() == (1, 1)
        assert len(q) == 1

    def test_update_absent_raises(self):
        q = PriorityQueue()
        with pytest.raises(KeyError):
            q.update((1.0, 0.0), (0, 0))

    def test_remove(self):
        q = PriorityQueue()
        q.insert((1.0, 0.0), (0, 0))
        q.insert((2.0, 0.0), (1, 1))
        q.remove((0, 0))
        assert (0, 0) not in q
        assert q.pop_min() == (1, 1)

    def test_pop_empty_is_distinct_error(self):
        q = PriorityQueue()
        with pytest.raises(EmptyQueueError):
            q.pop_min()
        with pytest.raises(EmptyQueueError):
            q.peek_min_key()

    def test_random_stream_matches_sort_oracle(self):
        rng = np.random.default_rng(1)
        q = PriorityQueue()
        live = {}
        for i in range(1000):
            cell = (int(rng.integers(40)), int(rng.integers(40)))
            key = (round(float(rng.normal()), 6), round(float(rng.normal()), 6))
            if cell in live:
                q.update(key, cell)
            else:
                q.insert(key, cell)
            live[cell] = key
            if rng.random() < 0.3 and live:
                expect = min((k, c) for c, k in live.items())
                got = q.pop_min()
                assert (live[got], got) == expect
                del live[got]
        drained = []
        while live:
            cell = q.pop_min()
            drained.append((live.pop(cell), cell))
        assert drained == sorted(drained)


class TestDijkstraOracle:
    def test_uniform_straight_line(self):
        g = ProbGrid(np.ones((5, 5)))
        res = dijkstra_oracle(g, (0, 0), (0, 3), w_trav=7.0)
        assert res.succeeded
        assert res.cost == pytest.approx(3.0)
        assert res.path == [(0, 0), (0, 1), (0, 2), (0, 3)]

    def test_single_diagonal(self):
        g = ProbGrid(np.ones((5, 5)))
        res = dijkstra_oracle(g, (2, 2), (3, 3), w_trav=0.0)
        assert res.cost == pytest.approx(SQRT2)

    def test_matches_exhaustive_enumeration(self):
        rng = np.random.default_rng(2)
        for _ in range(8):
            g = random_grid(rng, 4, 4)
            res = dijkstra_oracle(g, (0, 0), (3, 3), w_trav=10.0)
            best = exhaustive_best_cost(g.probs, (0, 0), (3, 3), 10.0)
            assert res.cost == pytest.approx(best, abs=1e-9)

    def test_unreachable_reports_failure(self):
        arr = np.ones((5, 5))
        arr[2, :] = 0.0
        res = dijkstra_oracle(ProbGrid(arr), (0, 0), (4, 4), w_trav=1.0)
        assert not res.succeeded
        assert res.path == []

    def test_cost_equals_repriced_path(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = random_grid(rng, 10, 10)
            res = dijkstra_oracle(g, (0, 0), (9, 9), w_trav=10.0)
            assert res.succeeded
            assert_valid_path(res.path, (0, 0), (9, 9))
            assert path_cost(res.path, g, 10.0) == pytest.approx(res.cost, abs=1e-9)

    def test_out_of_bounds_rejected(self):
        g = ProbGrid(np.ones((4, 4)))
        with pytest.raises(ValueError):
            dijkstra_oracle(g, (0, 0), (9, 9), 1.0)
