import math

import numpy as np
import pytest

from framecs.drip import exact_drip, support_spectrum_range
from framecs.errors import ContractViolation
from framecs.frames import make_dct_frame, make_identity_frame, make_random_tight_frame
from framecs.guarantees import error_bound, constants_general, threshold_general
from framecs.sensing import SensingModel, gen_gaussian, measure
from framecs.solvers import (
    SolverOptions,
    project_l2_ball,
    soft_threshold,
    solve_p0_oracle,
    solve_p1,
    solve_pq,
)


def normalized_instance(seed, n=8, d=12, m=128, s=2, eps=0.05, frame_kind="random"):
    """Seeded instance with A rescaled to its smallest order-2s constant."""
    if frame_kind == "random":
        frame = make_random_tight_frame(n, d, seed=seed)
    else:
        frame = make_dct_frame(n)
    a = gen_gaussian(m, n, seed=seed + 10_000)
    lo, hi = support_spectrum_range(a, frame, 2 * s)
    a = a * math.sqrt(2.0 / (hi + lo))
    rng = np.random.default_rng(seed + 20_000)
    x = np.zeros(frame.d)
    x[rng.choice(frame.d, s, replace=False)] = rng.standard_normal(s)
    f = frame.matrix @ x
    mode = "bounded" if eps > 0 else "none"
    model = measure(a, f, mode, eps, seed=seed + 30_000)
    return frame, a, f, model


class TestSolverOptions:
    def test_defaults(self):
        opts = SolverOptions()
        assert opts.max_iters == 20000
        assert opts.tol == 1e-9
        assert opts.smoothing_floor == 1e-10
        assert opts.continuation_factor == 0.7

    def test_validation(self):
        with pytest.raises(ContractViolation):
            SolverOptions(max_iters=0)
        with pytest.raises(ContractViolation):
            SolverOptions(continuation_factor=1.5)


class TestProximalMaps:
    def test_soft_threshold(self):
        out = soft_threshold(np.array([3.0, -1.0, 0.5]), 1.0)
        assert np.array_equal(out, [2.0, 0.0, 0.0])

    def test_soft_threshold_zero(self):
        v = np.array([1.0, -2.0])
        assert np.array_equal(soft_threshold(v, 0.0), v)

    def test_soft_threshold_kills_everything(self):
        v = np.array([1.0, -2.0, 0.3])
        assert np.array_equal(soft_threshold(v, 2.0), [0.0, 0.0, 0.0])

    def test_project_inside(self):
        v = np.array([3.0, 4.0])
        assert np.array_equal(project_l2_ball(v, np.zeros(2), 5.0), v)

    def test_project_scales(self):
        out = project_l2_ball(np.array([3.0, 4.0]), np.zeros(2), 2.5)
        assert np.allclose(out, [1.5, 2.0], atol=1e-14)

    def test_project_zero_radius(self):
        c = np.array([1.0, 1.0])
        assert np.array_equal(project_l2_ball(np.array([5.0, -2.0]), c, 0.0), c)


class TestSolveP1:
    def test_pinned_feasible_point(self):
        # D = I, A = I, eps = 0: the constraint pins f = y
        y = np.array([1.0, -0.5, 2.0])
        model = SensingModel(A=np.eye(3), y=y, epsilon=0.0)
        res = solve_p1(make_identity_frame(3), model)
        assert res.converged
        assert np.linalg.norm(res.f_hat - y) <= 1e-8

    def test_zero_feasible_shortcut(self):
        model = SensingModel(A=np.eye(2), y=np.array([0.1, 0.0]), epsilon=0.5)
        res = solve_p1(make_identity_frame(2), model)
        assert res.converged and res.objective == 0.0
        assert np.array_equal(res.f_hat, np.zeros(2))

    def test_matches_l0_oracle_noiseless(self):
        # orthobasis frame, 2-sparse analysis coefficients, eps = 0
        frame = make_dct_frame(12)
        a = gen_gaussian(9, 12, seed=41)
        rng = np.random.default_rng(42)
        x = np.zeros(12)
        x[[3, 8]] = rng.standard_normal(2) + np.sign(rng.standard_normal(2))
        f = frame.matrix @ x
        model = measure(a, f, "none")
        oracle = solve_p0_oracle(frame, model, s_max=2)
        assert oracle.converged and np.linalg.norm(oracle.f_hat - f) <= 1e-9
        res = solve_p1(frame, model)
        assert res.converged
        assert np.linalg.norm(res.f_hat - f) <= 1e-4

    def test_feasibility_invariant(self):
        for seed in range(5):
            frame, a, f, model = normalized_instance(seed)
            res = solve_p1(frame, model)
            if res.converged:
                assert res.residual <= model.epsilon * (1 + 1e-6) + 1e-9

    def test_objective_reevaluates(self):
        frame, a, f, model = normalized_instance(7)
        res = solve_p1(frame, model)
        assert res.objective == pytest.approx(
            float(np.abs(frame.matrix.T @ res.f_hat).sum()), abs=0.0)

    def test_guarantee_bound_end_to_end(self):
        frame, a, f, model = normalized_instance(11)
        delta = exact_drip(a, frame, 4).delta
        assert delta < threshold_general()
        res = solve_p1(frame, model)
        assert res.converged
        coeffs = frame.matrix.T @ f
        assert np.abs(frame.matrix.T @ res.f_hat).sum() <= np.abs(coeffs).sum()
        c0, c1 = constants_general(delta)
        from framecs.frames import best_s_term
        tail = best_s_term(coeffs, 2).tail_l1
        bound = error_bound(c0, c1, tail, 2, model.epsilon)
        assert np.linalg.norm(res.f_hat - f) <= bound * (1 + 1e-6)

    def test_monotone_recorded_objective(self):
        frame, a, f, model = normalized_instance(13)
        res = solve_p1(frame, model)
        trace = np.asarray(res.diagnostics["objective_trace"][50:])
        assert np.all(np.diff(trace) <= 1e-10)

    def test_perturbation_optimality_probe(self):
        frame, a, f, model = normalized_instance(17, eps=0.05)
        res = solve_p1(frame, model)
        assert res.converged
        rng = np.random.default_rng(99)
        eps = model.epsilon
        base_res = a @ res.f_hat - model.y
        for _ in range(100):
            delta_vec = rng.standard_normal(frame.n) * 10.0 ** rng.uniform(-4, -1)
            cand = res.f_hat + delta_vec
            r = a @ cand - model.y
            nr = np.linalg.norm(r)
            if nr > eps:
                # walk back toward the solver's point until feasible
                t_lo, t_hi = 0.0, 1.0
                for _ in range(60):
                    t = 0.5 * (t_lo + t_hi)
                    if np.linalg.norm(base_res + t * (r - base_res)) <= eps:
                        t_lo = t
                    else:
                        t_hi = t
                cand = res.f_hat + t_lo * delta_vec
            assert np.abs(frame.matrix.T @ cand).sum() \
                >= res.objective - 1e-6

    def test_surrogate_invariant(self):
        for seed in range(5):
            frame, a, f, model = normalized_instance(seed + 60)
            res = solve_p1(frame, model)
            if res.converged:
                assert float(np.abs(frame.matrix.T @ res.f_hat).sum()) \
                    <= float(np.abs(frame.matrix.T @ f).sum()) + 1e-6

    def test_custom_options(self):
        frame, a, f, model = normalized_instance(19)
        res = solve_p1(frame, model, SolverOptions(max_iters=50, tol=1e-3))
        assert res.iterations <= 50


class TestSolvePq:
    def test_q_domain(self):
        model = SensingModel(A=np.eye(2), y=np.ones(2), epsilon=0.0)
        with pytest.raises(ContractViolation):
            solve_pq(make_identity_frame(2), model, 1.0)

    def test_zero_instance(self):
        model = SensingModel(A=np.eye(3), y=np.zeros(3), epsilon=0.0)
        res = solve_pq(make_identity_frame(3), model, 0.5)
        assert res.converged and res.iterations <= 1
        assert np.array_equal(res.f_hat, np.zeros(3))

    def test_exact_sparse_recovery(self):
        # noiseless orthobasis instance with a unique sparsest solution
        frame = make_dct_frame(10)
        a = gen_gaussian(30, 10, seed=71)
        rng = np.random.default_rng(72)
        x = np.zeros(10)
        x[[1, 6]] = rng.standard_normal(2) + np.sign(rng.standard_normal(2))
        f = frame.matrix @ x
        model = measure(a, f, "none")
        oracle = solve_p0_oracle(frame, model, s_max=2)
        assert oracle.converged and np.linalg.norm(oracle.f_hat - f) <= 1e-9
        res = solve_pq(frame, model, 0.5)
        assert res.converged
        assert np.linalg.norm(res.f_hat - f) <= 1e-4

    def test_q_near_one_matches_p1(self):
        frame, a, f, model = normalized_instance(23, eps=0.0)
        obj_p1 = solve_p1(frame, model).objective
        obj_pq = solve_pq(frame, model, 0.99).objective
        assert obj_pq <= obj_p1 * 1.02 + 1e-9
        assert obj_pq >= obj_p1 * 0.9

    def test_feasibility_noisy(self):
        frame, a, f, model = normalized_instance(29, eps=0.1)
        res = solve_pq(frame, model, 0.5)
        assert res.converged
        assert res.residual <= model.epsilon * (1 + 1e-6) + 1e-9

    def test_descent_within_levels(self):
        # classical majorize-minimize property at fixed smoothing
        frame, a, f, model = normalized_instance(31, eps=0.0)
        res = solve_pq(frame, model, 0.5)
        for level in res.diagnostics["level_traces"]:
            diffs = np.diff(np.asarray(level))
            if diffs.size:
                assert np.all(diffs <= 1e-10)

    def test_objective_reevaluates(self):
        frame, a, f, model = normalized_instance(37, eps=0.05)
        res = solve_pq(frame, model, 0.7)
        coeffs = frame.matrix.T @ res.f_hat
        assert res.objective == pytest.approx(float(np.sum(np.abs(coeffs) ** 0.7)),
                                              abs=0.0)


class TestSolveP0:
    def test_identity_instance(self):
        y = np.array([0.0, 3.0, 0.0, -1.0])
        model = SensingModel(A=np.eye(4), y=y, epsilon=0.0)
        res = solve_p0_oracle(make_identity_frame(4), model, s_max=3)
        assert res.converged
        assert np.array_equal(res.f_hat, y)
        assert res.objective == 2.0

    def test_zero_observation(self):
        model = SensingModel(A=np.eye(3), y=np.zeros(3), epsilon=0.0)
        res = solve_p0_oracle(make_identity_frame(3), model, s_max=2)
        assert res.converged and res.objective == 0.0
        assert res.iterations == 1  # the empty support came first

    def test_exact_recovery_when_delta_lt_one(self):
        recovered = 0
        for seed in range(10):
            frame = make_identity_frame(10)
            a = gen_gaussian(12, 10, seed=seed + 500)
            lo, hi = support_spectrum_range(a, frame, 4)
            a = a * math.sqrt(2.0 / (hi + lo))
            assert exact_drip(a, frame, 4).delta < 1.0
            rng = np.random.default_rng(seed)
            x = np.zeros(10)
            x[rng.choice(10, 2, replace=False)] = \
                rng.standard_normal(2) + np.sign(rng.standard_normal(2))
            model = measure(a, frame.matrix @ x, "none")
            res = solve_p0_oracle(frame, model, s_max=2)
            assert res.converged
            assert np.linalg.norm(res.f_hat - frame.matrix @ x) <= 1e-9
            recovered += 1
        assert recovered == 10

    def test_objective_dominance(self):
        # planted 3-sparse signal: the oracle may only ever do better
        frame = make_dct_frame(9)
        a = gen_gaussian(9, 9, seed=43)
        rng = np.random.default_rng(44)
        x = np.zeros(9)
        x[rng.choice(9, 3, replace=False)] = 1.0 + rng.random(3)
        model = measure(a, frame.matrix @ x, "none")
        res = solve_p0_oracle(frame, model, s_max=3)
        assert res.converged
        assert res.objective <= np.count_nonzero(x)

    def test_rejects_noise(self):
        model = SensingModel(A=np.eye(2), y=np.ones(2), epsilon=0.1)
        with pytest.raises(ContractViolation):
            solve_p0_oracle(make_identity_frame(2), model, 1)
