"""Baseline planners: thresholding, A*, RRT*, and the navigating baselines."""

import math

import numpy as np
import pytest

from probnav import (
    BinaryMap,
    GroundTruthMask,
    PlannerParams,
    ProbGrid,
    a_star,
    d_star_lite_navigate,
    dijkstra_oracle,
    euclid,
    rra_star_navigate,
    rrt_star,
    threshold_map,
    urd_navigate,
)

from helpers import assert_valid_path, corridor_world

SQRT2 = math.sqrt(2.0)


class TestThresholdMap:
    def test_boundary_is_free(self):
        g = ProbGrid(np.array([[0.5, 0.49], [0.51, 1.0]]))
        bm = threshold_map(g, 0.5)
        assert bm.free.tolist() == [[True, False], [True, True]]

    def test_lower_tau_frees_superset(self):
        rng = np.random.default_rng(0)
        g = ProbGrid(rng.uniform(size=(15, 15)))
        hi = threshold_map(g, 0.5)
        lo = threshold_map(g, 0.3)
        assert np.all(lo.free | ~hi.free)
        assert lo.free.sum() >= hi.free.sum()

    def test_free_count_matches_brute_count(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            arr = rng.uniform(size=(12, 9))
            tau = float(rng.uniform(0.1, 0.9))
            bm = threshold_map(ProbGrid(arr), tau)
            brute = sum(1 for v in arr.ravel() if v >= tau)
            assert int(bm.free.sum()) == brute

    def test_tau_range_checked(self):
        g = ProbGrid(np.ones((3, 3)))
        with pytest.raises(ValueError):
            threshold_map(g, 0.0)


class TestAStar:
    def test_all_free_diagonal(self):
        bm = BinaryMap(np.ones((5, 5), dtype=bool))
        res = a_star(bm, (0, 0), (4, 4))
        assert res.succeeded
        assert res.cost == pytest.approx(4 * SQRT2, abs=1e-9)

    def test_blocked_goal_fails(self):
        free = np.ones((5, 5), dtype=bool)
        free[4, 4] = False
        res = a_star(BinaryMap(free), (0, 0), (4, 4))
        assert not res.succeeded

    def test_disconnected_fails(self):
        free = np.ones((5, 5), dtype=bool)
        free[2, :] = False
        res = a_star(BinaryMap(free), (0, 0), (4, 4))
        assert not res.succeeded

    def test_optimal_on_random_binarized_grids(self):
        rng = np.random.default_rng(2)
        checked = 0
        for _ in range(200):
            arr = rng.uniform(size=(20, 20))
            bm = threshold_map(ProbGrid(arr), 0.5)
            if not (bm.is_free((0, 0)) and bm.is_free((19, 19))):
                continue
            res = a_star(bm, (0, 0), (19, 19))
            # price geometry only: blocked cells are exactly 0 on a binary grid
            oracle = dijkstra_oracle(ProbGrid(bm.free.astype(float)), (0, 0), (19, 19), 0.0)
            assert res.succeeded == oracle.succeeded
            if res.succeeded:
                assert res.cost == pytest.approx(oracle.cost, abs=1e-9)
                assert_valid_path(res.path, (0, 0), (19, 19))
            checked += 1
        assert checked >= 40  # ~25% of random maps have both endpoints free


class TestRrtStar:
    def test_all_free_statistical_quality(self):
        bm = BinaryMap(np.ones((30, 30), dtype=bool))
        start, goal = (2, 2), (27, 27)
        costs = []
        for seed in range(20):
            res = rrt_star(bm, start, goal, step=5, radius=15, iters=600, rng_seed=seed)
            assert res.succeeded, f"seed {seed} failed on an empty map"
            assert_valid_path(res.path, start, goal)
            costs.append(res.cost)
        assert sum(costs) / len(costs) <= 2.0 * euclid(start, goal)

    def test_walled_off_goal_consumes_budget(self):
        free = np.ones((20, 20), dtype=bool)
        free[10, :] = False
        res = rrt_star(BinaryMap(free), (2, 2), (17, 17), iters=400, rng_seed=3)
        assert not res.succeeded
        assert res.nodes_expanded == 400

    def test_fixed_seed_is_deterministic(self):
        rng = np.random.default_rng(4)
        free = rng.uniform(size=(25, 25)) > 0.2
        free[1, 1] = free[23, 23] = True
        bm = BinaryMap(free)
        a = rrt_star(bm, (1, 1), (23, 23), iters=500, rng_seed=11)
        b = rrt_star(bm, (1, 1), (23, 23), iters=500, rng_seed=11)
        assert a.path == b.path
        assert a.cost == b.cost

    def test_path_cells_all_free(self):
        rng = np.random.default_rng(5)
        for seed in range(5):
            free = rng.uniform(size=(20, 20)) > 0.25
            free[0, 0] = free[19, 19] = True
            res = rrt_star(BinaryMap(free), (0, 0), (19, 19), iters=800, rng_seed=seed)
            if res.succeeded:
                for r, c in res.path:
                    assert free[r, c]

    def test_blocked_endpoint_fails(self):
        free = np.ones((10, 10), dtype=bool)
        free[0, 0] = False
        res = rrt_star(BinaryMap(free), (0, 0), (9, 9), iters=50, rng_seed=0)
        assert not res.succeeded


class TestDStarLiteNavigate:
    def test_obstacle_free_route_matches_astar(self):
        grid = ProbGrid(np.full((15, 15), 0.9))
        gt = GroundTruthMask(np.ones((15, 15), dtype=bool))
        p = PlannerParams(scan_radius=4, grid_w=15, grid_h=15)
        nav = d_star_lite_navigate(grid, gt, (0, 0), (14, 14), p)
        ref = a_star(threshold_map(grid, 0.5), (0, 0), (14, 14))
        assert nav.outcome == "reached"
        nav_len = sum(euclid(a, b) for a, b in zip(nav.traversed_path, nav.traversed_path[1:]))
        assert nav_len == pytest.approx(ref.cost, abs=1e-9)

    def test_corridor_fixture_with_believable_map(self):
        # model roughly right about the wall but fuzzy about the opening:
        # both replanners should reach, with the incremental one cheaper to
        # repair than a full re-search on this fixture
        gt_arr = np.ones((15, 15), dtype=bool)
        gt_arr[7, :] = False
        gt_arr[7, 12] = True
        m = np.full((15, 15), 0.9)
        m[7, :] = 0.1
        m[7, 12] = 0.55
        m[7, 3] = 0.55  # a fake opening the robot may need to rule out
        grid, gt = ProbGrid(m), GroundTruthMask(gt_arr)
        p = PlannerParams(scan_radius=3, grid_w=15, grid_h=15)
        dl = d_star_lite_navigate(grid, gt, (2, 5), (12, 5), p)
        ur = urd_navigate(grid, gt, (2, 5), (12, 5), p)
        assert dl.outcome == "reached"
        assert ur.outcome == "reached"
        for nav in (dl, ur):
            for cell in nav.traversed_path:
                assert gt.traversable(cell)

    def test_sealed_goal_fails(self):
        gt = np.ones((10, 10), dtype=bool)
        gt[4:7, 4:7] = False
        gt[5, 5] = True
        grid = ProbGrid(np.full((10, 10), 0.9))
        p = PlannerParams(scan_radius=2, grid_w=10, grid_h=10)
        nav = d_star_lite_navigate(grid, GroundTruthMask(gt), (0, 0), (5, 5), p)
        assert nav.outcome == "fail"

    def test_model_disconnected_at_threshold_fails_immediately(self):
        grid, gt, start, goal = corridor_world()
        # erase the model's fake gap so the binary map is fully walled
        arr = grid.probs.copy()
        arr[7, :] = 0.1
        p = PlannerParams(scan_radius=3, grid_w=15, grid_h=15)
        nav = d_star_lite_navigate(ProbGrid(arr), gt, start, goal, p)
        assert nav.outcome == "fail"
        assert len(nav.traversed_path) == 1  # never moved


class TestRraStarNavigate:
    def test_no_invalidation_single_plan(self):
        grid = ProbGrid(np.full((12, 12), 0.9))
        gt = GroundTruthMask(np.ones((12, 12), dtype=bool))
        p = PlannerParams(scan_radius=4, grid_w=12, grid_h=12)
        nav = rra_star_navigate(grid, gt, (0, 0), (11, 11), p)
        assert nav.outcome == "reached"
        assert nav.replans == 0  # exactly one planning call, zero replans

    def test_single_on_route_block_two_plans(self):
        # straight corridor; one GT-blocked cell sits on the initial route
        # just outside the first scan
        m = np.full((9, 15), 0.9)
        gt_arr = np.ones((9, 15), dtype=bool)
        gt_arr[4, 8] = False
        grid, gt = ProbGrid(m), GroundTruthMask(gt_arr)
        p = PlannerParams(scan_radius=2, grid_w=15, grid_h=9)
        nav = rra_star_navigate(grid, gt, (4, 0), (4, 14), p)
        assert nav.outcome == "reached"
        assert nav.replans == 1  # initial plan + exactly one replan
        for cell in nav.traversed_path:
            assert gt.traversable(cell)

    def test_corridor_fixture_validity(self):
        grid, gt, start, goal = corridor_world()
        p = PlannerParams(scan_radius=3, grid_w=15, grid_h=15)
        nav = rra_star_navigate(grid, gt, start, goal, p)
        # the model's binary map has a gap the robot disproves; whatever the
        # outcome, the trajectory must be valid
        for cell in nav.traversed_path:
            assert gt.traversable(cell)
        for a, b in zip(nav.traversed_path, nav.traversed_path[1:]):
            assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1


class TestSharedLoop:
    def test_navigators_share_the_simulation_driver(self):
        # comparisons across methods are only fair if the scan/reveal loop
        # is literally the same code object
        import probnav.baselines as b
        import probnav.urd as u

        assert b._run_navigation is u._run_navigation
