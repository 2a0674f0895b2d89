import numpy as np
import pytest

from edgesign.batch import (LpModel, LpOptions, UnregOptions, lp_gradient,
                            lp_objective, lp_predict, lp_run, tune_threshold,
                            unreg_objective, unreg_predict, unreg_solve)
from edgesign.errors import ConvergenceError
from edgesign.graph import SignedDigraph, load_edge_list, sample_split

from conftest import make_split, random_graph
from oracles import finite_difference, grid_minimum, lp_reference_minimize, refine_minimum


class TestLpRun:
    def test_single_training_edge_fixed_point(self):
        g = load_edge_list("a\tb\t1\n")
        split = make_split([True])
        state = lp_run(g, split)
        assert abs(state.p[0] - 0.5) <= 1e-12
        assert abs(state.q[1] - 0.5) <= 1e-12
        # fixed point of p = (2 - q)/3, q = (2 - p)/3
        assert abs(state.p[0] - (2.0 - state.q[1]) / 3.0) <= 1e-8

    def test_no_edges(self):
        g = SignedDigraph(3, [], [], [])
        split = make_split(np.zeros(0, dtype=bool))
        state = lp_run(g, split)
        assert state.iterations == 0
        assert np.all(state.p == 0.5) and np.all(state.q == 0.5)

    def test_zero_degree_sides_keep_init(self):
        g = load_edge_list("a\tb\t1\n")
        state = lp_run(g, make_split([True]))
        assert state.q[0] == 0.5  # node a has no incoming edges
        assert state.p[1] == 0.5  # node b has no outgoing edges

    def test_gradient_vanishes_at_fixed_point(self):
        for seed in range(5):
            g = random_graph(15, 50, seed=seed)
            split = sample_split(g, 0.4, seed=seed + 100)
            state = lp_run(g, split, LpOptions(tol=1e-10))
            gp, gq, gt = lp_gradient(g, split, state.p, state.q, state.y_soft)
            assert max(np.abs(gp).max(initial=0), np.abs(gq).max(initial=0),
                       np.abs(gt).max(initial=0)) <= 1e-6

    def test_objective_matches_finite_difference_gradient(self):
        g = random_graph(8, 20, seed=6)
        split = sample_split(g, 0.5, seed=7)
        rng = np.random.default_rng(8)
        n_test = split.test_indices().size
        x0 = rng.uniform(0.1, 0.6, size=16 + n_test)

        def fun(x):
            return lp_objective(g, split, x[:8], x[8:16], x[16:])

        gp, gq, gt = lp_gradient(g, split, x0[:8], x0[8:16], x0[16:])
        fd = finite_difference(fun, x0, h=1e-6)
        assert np.abs(np.concatenate([gp, gq, gt]) - fd).max() <= 1e-5

    def test_objective_nonincreasing_over_sweeps(self):
        g = random_graph(12, 45, seed=9)
        split = sample_split(g, 0.3, seed=10)
        values = []
        for sweeps in range(1, 12):
            try:
                state = lp_run(g, split, LpOptions(tol=0.0, max_sweeps=sweeps))
            except ConvergenceError as err:
                state = err.state
            values.append(lp_objective(g, split, state.p, state.q, state.y_soft))
        assert np.all(np.diff(values) <= 1e-10)

    def test_matches_reference_minimizer(self):
        for seed in range(6):
            g = random_graph(10, 30, seed=seed + 20)
            split = sample_split(g, 0.4, seed=seed + 200)
            state = lp_run(g, split, LpOptions(tol=1e-12, max_sweeps=20000))
            p, q, t = lp_reference_minimize(g, split)
            assert np.abs(state.p - p).max() <= 1e-6
            assert np.abs(state.q - q).max() <= 1e-6
            if t.size:
                assert np.abs(state.y_soft - t).max() <= 1e-6

    def test_two_variable_instance_matches_grid(self):
        g = load_edge_list("a\tb\t1\n")
        split = make_split([True])

        def fun(x):
            return lp_objective(g, split, np.array([x[0], 0.5]),
                                np.array([0.5, x[1]]), np.zeros(0))

        best_val, best_point = grid_minimum(fun, [(-1, 1), (-1, 1)], 0.001)
        state = lp_run(g, split, LpOptions(tol=1e-12))
        assert abs(state.p[0] - best_point[0]) <= 5e-4
        assert abs(state.q[1] - best_point[1]) <= 5e-4

    def test_untrained_component_settles_at_zero(self):
        g = load_edge_list("a\tb\t1\nc\td\t-1\n")
        split = make_split([True, False])
        state = lp_run(g, split)
        assert state.p[2] == 0.0 and state.q[3] == 0.0
        assert state.y_soft[0] == 0.0
        # and this is where the reference minimizer goes too
        p, q, t = lp_reference_minimize(g, split)
        assert abs(p[2]) <= 1e-6 and abs(q[3]) <= 1e-6 and abs(t[0]) <= 1e-6

    def test_max_sweeps_error_carries_state(self):
        g = random_graph(20, 80, seed=11)
        split = sample_split(g, 0.3, seed=12)
        with pytest.raises(ConvergenceError) as err:
            lp_run(g, split, LpOptions(tol=1e-14, max_sweeps=2))
        assert err.value.state is not None
        assert err.value.state.iterations == 2


class TestLpPredict:
    def test_positive_soft_value_with_zero_threshold(self):
        g = load_edge_list("a\tb\t1\na\tc\t1\nb\tc\t-1\nc\ta\t1\n")
        split = make_split([True, True, True, False])
        state = lp_run(g, split)
        pred = lp_predict(state, g, split)
        assert pred.labels[0] in (-1, 1)
        assert pred.scores[0] == state.y_soft[0]

    def test_all_positive_training_predicts_positive(self):
        g = load_edge_list("a\tb\t1\nb\tc\t1\nc\td\t1\nd\ta\t1\na\tc\t1\n")
        split = make_split([True, True, True, True, False])
        state = lp_run(g, split)
        pred = lp_predict(state, g, split)
        assert pred.threshold == float("-inf")
        assert np.all(pred.labels == 1)

    def test_persisted_model_reproduces_scores_bitwise(self, tmp_path):
        from edgesign.batch import load_model, save_model
        g = random_graph(15, 60, seed=13)
        split = sample_split(g, 0.4, seed=14)
        state = lp_run(g, split)
        pred = lp_predict(state, g, split)
        model = LpModel(p=state.p, q=state.q, threshold=pred.threshold)
        path = tmp_path / "lp.json"
        save_model(model, path)
        again = load_model(path)
        pred2 = again.predict_split(g, split)
        assert np.array_equal(pred.scores, pred2.scores)
        assert np.array_equal(pred.labels, pred2.labels)


class TestUnreg:
    def test_single_training_edge_objective_vanishes(self):
        g = load_edge_list("a\tb\t1\n")
        split = make_split([True])
        result = unreg_solve(g, split)
        assert result.objective <= 1e-12
        assert abs(result.p[0] - 1.0) <= 1e-6
        assert abs(result.q[1] - 1.0) <= 1e-6

    def test_below_lp_unregularized_value(self):
        # the box-constrained optimum cannot exceed the value at the
        # (clipped) propagation fixed point
        for seed in range(5):
            g = random_graph(10, 35, seed=seed + 40)
            split = sample_split(g, 0.5, seed=seed + 400)
            state = lp_run(g, split, LpOptions(tol=1e-10))
            result = unreg_solve(g, split, UnregOptions(tol=1e-8))
            p_clip = np.clip(state.p, 0.0, 1.0)
            q_clip = np.clip(state.q, 0.0, 1.0)
            y_clip = np.clip(2.0 * state.y_soft - 1.0, -1.0, 1.0)
            lp_value = unreg_objective(g, split, p_clip, q_clip, y_clip)
            assert result.objective <= lp_value + 1e-9

    def test_two_variable_instance_matches_grid(self):
        g = load_edge_list("a\tb\t1\n")
        split = make_split([True])

        def fun(x):
            return unreg_objective(g, split, np.array([x[0], 0.5]),
                                   np.array([0.5, x[1]]), np.zeros(0))

        best_val, _ = grid_minimum(fun, [(0, 1), (0, 1)], 0.001)
        result = unreg_solve(g, split)
        assert result.objective <= best_val + 1e-9

    def test_four_variable_instance_matches_refined_grid(self):
        # one training edge (a,b,+), one test edge (a,c): vars p_a,q_b,q_c,y
        g = load_edge_list("a\tb\t1\na\tc\t1\n")
        split = make_split([True, False])

        def fun(x):
            return unreg_objective(g, split, np.array([x[0], 0.5, 0.5]),
                                   np.array([0.5, x[1], x[2]]), x[3:])

        coarse_val, coarse_pt = grid_minimum(
            fun, [(0, 1), (0, 1), (0, 1), (-1, 1)], 0.1)
        fine_val, _ = refine_minimum(fun, coarse_pt, 0.1, 0.01)
        result = unreg_solve(g, split)
        assert result.objective <= fine_val + 1e-9

    def test_stationarity(self):
        g = random_graph(12, 40, seed=15)
        split = sample_split(g, 0.5, seed=16)
        result = unreg_solve(g, split, UnregOptions(tol=1e-9))
        assert result.pg_norm <= 1e-9

    def test_predict_uses_consistent_scales(self):
        g = random_graph(12, 50, seed=17)
        split = sample_split(g, 0.5, seed=18)
        result = unreg_solve(g, split)
        pred = unreg_predict(result, g, split)
        assert np.array_equal(pred.scores, result.y_soft)
        assert set(np.unique(pred.labels)) <= {-1, 1}
