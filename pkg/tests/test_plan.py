import numpy as np
import pytest

from surfnav import (
    ExtractionParams,
    NoPathError,
    OccupancyGrid,
    OffSurfaceError,
    PlanParams,
    SearchGraph,
    distance_field,
    edge_cost,
    extract_pipeline,
    extract_surface,
    candidate_set,
    DerivedVoxelParams,
    heuristic,
    plan,
    successors,
)


def flat(n=10, post=None):
    """n x n floor, optionally with a full-height post removing one column."""
    occ = np.zeros((n, n, 12), dtype=bool)
    occ[:, :, 0] = True
    if post is not None:
        occ[post[0], post[1], 1:10] = True
    grid = OccupancyGrid(0.2, np.zeros(3), occ)
    surface, _ = extract_pipeline(
        grid, ExtractionParams(inflation_radius=0.0), seed_voxel=(0, 0, 1)
    )
    return surface, distance_field(surface)


class TestCostModel:
    def test_flat_edge(self):
        c = edge_cost((0, 0, 0), (1, 0, 0), 3, PlanParams(), 0.2)
        assert c == pytest.approx(0.225, abs=1e-15)

    def test_climbing_edge(self):
        c = edge_cost((0, 0, 0), (0, 1, 1), 9, PlanParams(), 0.2)
        assert c == pytest.approx(0.692842712474619, abs=1e-15)

    def test_descent_cheaper_than_climb(self):
        up = edge_cost((0, 0, 0), (1, 0, 1), 5, PlanParams(), 0.2)
        down = edge_cost((0, 0, 1), (1, 0, 0), 5, PlanParams(), 0.2)
        assert down < up

    def test_heuristic_values(self):
        assert heuristic((0, 0, 0), (3, 4, 0), PlanParams(), 0.2) == pytest.approx(1.0)
        assert heuristic((0, 0, 0), (0, 0, 2), PlanParams(), 0.2) == pytest.approx(0.8)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            PlanParams(epsilon=0.9)
        with pytest.raises(ValueError):
            PlanParams(w_up=0.5, w_down=1.0)
        with pytest.raises(ValueError):
            PlanParams(w_obstacle=-0.1)
        with pytest.raises(ValueError):
            PlanParams(epsilon=float("inf"))


class TestSuccessors:
    def layered(self):
        occ = np.zeros((8, 8, 12), dtype=bool)
        occ[:, :, 0] = True
        occ[2:5, 2:5, 5] = True
        grid = OccupancyGrid(0.2, np.zeros(3), occ)
        cands = candidate_set(
            grid,
            DerivedVoxelParams(
                step_voxels=1, clearance_voxels=3, inflation_voxels=0, resolution=0.2
            ),
        )
        return extract_surface(cands, [(0, 0, 1), (3, 3, 6)])

    def test_direction_major_order(self):
        surface, _ = flat(5)
        assert successors(surface, (2, 2, 1)) == [
            (3, 2, 1), (1, 2, 1), (2, 3, 1), (2, 1, 1)
        ]

    def test_step_bound_excludes_far_levels(self):
        surface = self.layered()
        # neighbor column (3, 3) holds z = 1 and z = 6; from z = 1 only the
        # low level is within one step
        assert successors(surface, (2, 3, 1)) == [
            (3, 3, 1), (1, 3, 1), (2, 4, 1), (2, 2, 1)
        ]
        assert (3, 3, 6) not in successors(surface, (2, 3, 1))

    def test_graph_matches_successors(self):
        surface = self.layered()
        graph = SearchGraph.build(surface)
        for i in range(surface.size):
            row = graph.targets[graph.indptr[i] : graph.indptr[i + 1]]
            got = [tuple(surface.states[j]) for j in row.tolist()]
            assert got == successors(surface, tuple(surface.states[i]))

    def test_graph_dz_matches_geometry(self):
        surface = self.layered()
        graph = SearchGraph.build(surface)
        for i in range(surface.size):
            lo, hi = graph.indptr[i], graph.indptr[i + 1]
            for e in range(lo, hi):
                j = graph.targets[e]
                assert graph.dz[e] == surface.states[j, 2] - surface.states[i, 2]


class TestPlan:
    def test_corner_to_corner_flat(self):
        surface, dfield = flat(10)
        params = PlanParams(w_obstacle=0.0)
        for engine in ("python", "numba"):
            result = plan(surface, dfield, (0, 0, 1), (9, 9, 1), params, engine=engine)
            assert result.cost == pytest.approx(18 * 0.2, abs=1e-12)
            assert result.metric_length == pytest.approx(3.6, abs=1e-12)
            assert result.metric_length_xy == result.metric_length
            assert result.states.shape == (19, 3)
            assert tuple(result.states[0]) == (0, 0, 1)
            assert tuple(result.states[-1]) == (9, 9, 1)

    def test_start_equals_goal(self):
        surface, dfield = flat(5)
        result = plan(surface, dfield, (2, 2, 1), (2, 2, 1))
        assert result.cost == 0.0
        assert result.states.shape == (1, 3)
        assert result.expanded == 0

    def test_off_surface_endpoints(self):
        surface, dfield = flat(5)
        with pytest.raises(OffSurfaceError, match=r"\(start\)"):
            plan(surface, dfield, (0, 0, 5), (2, 2, 1))
        with pytest.raises(OffSurfaceError, match=r"\(goal\)"):
            plan(surface, dfield, (2, 2, 1), (0, 0, 5))

    def test_no_path_across_components(self):
        occ = np.zeros((12, 12, 10), dtype=bool)
        occ[:, :, 0] = True
        occ[4:8, 4:8, 4] = True  # detached tabletop
        grid = OccupancyGrid(0.2, np.zeros(3), occ)
        cands = candidate_set(
            grid,
            DerivedVoxelParams(
                step_voxels=1, clearance_voxels=3, inflation_voxels=0, resolution=0.2
            ),
        )
        surface = extract_surface(cands, [(0, 0, 1), (5, 5, 5)])
        dfield = distance_field(surface)
        with pytest.raises(NoPathError):
            plan(surface, dfield, (0, 0, 1), (5, 5, 5))

    def test_cost_is_sum_of_edge_costs(self):
        surface, dfield = flat(9, post=(4, 4))
        params = PlanParams()
        result = plan(surface, dfield, (1, 1, 1), (7, 7, 1), params)
        total = 0.0
        for a, b in zip(result.states[:-1], result.states[1:]):
            total += edge_cost(a, b, dfield.at(b), params, surface.resolution)
        assert result.cost == pytest.approx(total, rel=1e-12)

    def test_obstacle_weight_pushes_path_off_walls(self):
        surface, dfield = flat(11, post=(5, 5))
        lax = plan(surface, dfield, (5, 2, 1), (5, 8, 1), PlanParams(w_obstacle=0.0))
        strict = plan(surface, dfield, (5, 2, 1), (5, 8, 1), PlanParams(w_obstacle=5.0))
        def min_clearance(result):
            return min(dfield.at(s) for s in result.states)
        assert min_clearance(strict) >= min_clearance(lax)
        assert strict.metric_length >= lax.metric_length

    def test_epsilon_bounded_suboptimality(self, table1):
        surface, dfield, graph = table1.surface, table1.dfield, table1.graph
        rng = np.random.default_rng(11)
        idx = rng.integers(0, surface.size, size=(8, 2))
        for a, b in idx:
            start = tuple(surface.states[a])
            goal = tuple(surface.states[b])
            exact = plan(surface, dfield, start, goal, PlanParams(), graph=graph)
            eager = plan(
                surface, dfield, start, goal, PlanParams(epsilon=1.5), graph=graph
            )
            assert exact.cost <= eager.cost + 1e-12
            assert eager.cost <= 1.5 * exact.cost + 1e-12

    def test_engines_bit_identical(self, table1):
        surface, dfield, graph = table1.surface, table1.dfield, table1.graph
        rng = np.random.default_rng(5)
        idx = rng.integers(0, surface.size, size=(10, 2))
        for a, b in idx:
            start = tuple(surface.states[a])
            goal = tuple(surface.states[b])
            rn = plan(surface, dfield, start, goal, engine="numba", graph=graph)
            rp = plan(surface, dfield, start, goal, engine="python", graph=graph)
            assert rn.cost == rp.cost  # bitwise, no tolerance
            assert rn.expanded == rp.expanded
            assert np.array_equal(rn.states, rp.states)

    def test_deterministic(self, table1):
        surface, dfield, graph = table1.surface, table1.dfield, table1.graph
        start = tuple(surface.states[0])
        goal = tuple(surface.states[-1])
        r1 = plan(surface, dfield, start, goal, graph=graph)
        r2 = plan(surface, dfield, start, goal, graph=graph)
        assert r1.cost == r2.cost
        assert np.array_equal(r1.states, r2.states)

    def test_unknown_engine(self):
        surface, dfield = flat(4)
        with pytest.raises(ValueError):
            plan(surface, dfield, (0, 0, 1), (1, 1, 1), engine="gpu")

    def test_foreign_dfield_rejected(self):
        surface_a, dfield_a = flat(5)
        surface_b, dfield_b = flat(5)
        with pytest.raises(ValueError):
            plan(surface_a, dfield_b, (0, 0, 1), (1, 1, 1))

    def test_foreign_graph_rejected(self):
        surface_a, dfield_a = flat(5)
        surface_b, _ = flat(5)
        graph_b = SearchGraph.build(surface_b)
        with pytest.raises(ValueError):
            plan(surface_a, dfield_a, (0, 0, 1), (1, 1, 1), graph=graph_b)

    def test_path_steps_stay_connected(self, table1):
        surface, dfield, graph = table1.surface, table1.dfield, table1.graph
        start = tuple(surface.states[3])
        goal = tuple(surface.states[surface.size // 2])
        result = plan(surface, dfield, start, goal, graph=graph)
        k = surface.params.step_voxels
        diffs = np.diff(result.states, axis=0)
        assert np.all(np.abs(diffs[:, 0]) + np.abs(diffs[:, 1]) == 1)
        assert np.all(np.abs(diffs[:, 2]) <= k)
