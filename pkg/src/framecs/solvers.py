"""Solvers for the three analysis-model recovery programs.

  P1 (convex):     min ||D* f||_1      s.t. ||A f - y||_2 <= eps
                   first-order primal-dual splitting over the stacked map
                   (D*, A); both dual proximal maps are closed form.
  Pq (nonconvex):  min ||D* f||_q^q    s.t. ||A f - y||_2 <= eps, 0 < q < 1
                   smoothed iteratively reweighted least squares with a
                   geometric continuation on the smoothing level; returns a
                   stationary point, not a certified global minimizer.
  P0 (oracle):     min ||D* f||_0      s.t. A f = y
                   exhaustive support search, noiseless only.

Both iterative solvers start from the minimum-norm feasible point and are
fully deterministic.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Optional

import numpy as np

from .drip import ENUMERATION_LIMIT
from .errors import ContractViolation, EnumerationLimitError
from .frames import TightFrame
from .linalg import as_vector, least_squares_min_norm, operator_norm
from .sensing import SensingModel

PROGRAM_P1 = "P1"
PROGRAM_PQ = "Pq"
PROGRAM_P0 = "P0"


@dataclass(frozen=True)
class SolverOptions:
    max_iters: int = 20000
    tol: float = 1e-9
    seed: int = 0
    smoothing_floor: float = 1e-10
    continuation_factor: float = 0.7

    def __post_init__(self):
        if self.max_iters < 1 or self.tol <= 0:
            raise ContractViolation("max_iters >= 1 and tol > 0 required")
        if self.smoothing_floor <= 0 or not 0.0 < self.continuation_factor < 1.0:
            raise ContractViolation("bad smoothing schedule")


@dataclass(frozen=True)
class RecoveryResult:
    f_hat: np.ndarray
    iterations: int
    converged: bool
    residual: float
    objective: float
    program: str
    diagnostics: Dict = field(default_factory=dict)

    def to_json_dict(self):
        diag = {}
        for k, v in self.diagnostics.items():
            if k in ("objective_trace", "level_traces"):
                continue  # per-iteration traces stay in memory only
            diag[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return {
            "f_hat": [float(v) for v in self.f_hat],
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "objective": self.objective,
            "program": self.program,
            "diagnostics": diag,
        }


def soft_threshold(v, t: float) -> np.ndarray:
    """Componentwise shrinkage sign(v) * max(|v| - t, 0)."""
    if t < 0:
        raise ContractViolation("threshold must be >= 0")
    v = as_vector(v)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def project_l2_ball(v, center, r: float) -> np.ndarray:
    """Euclidean projection of v onto the ball of radius r around center."""
    if r < 0:
        raise ContractViolation("radius must be >= 0")
    v = as_vector(v)
    center = as_vector(center)
    diff = v - center
    norm = float(np.linalg.norm(diff))
    if norm <= r:
        return v.copy()
    if norm == 0.0:
        return center.copy()
    return center + diff * (r / norm)


def _feasibility_tol(eps: float, tol: float) -> float:
    # convergence never certifies more infeasibility than the result
    # invariant residual <= eps (1 + 1e-6) + 1e-9 allows
    return min(tol, eps * 1e-6 + 1e-9)


def solve_p1(frame: TightFrame, model: SensingModel,
             opts: Optional[SolverOptions] = None) -> RecoveryResult:
    """Primal-dual splitting for the constrained l1 analysis program.

    Dual updates are componentwise clipping to [-1, 1] for the l1 block and
    the translated shrink map for the eps-ball block; step sizes satisfy
    tau * sigma * ||K||^2 <= 1 where ||K||^2 <= 1 + ||A||^2 (the tight frame
    contributes exactly 1).  tau and sigma are rebalanced on the fly to
    equalize the primal and dual residuals with geometrically diminishing
    adjustments, which keeps the product (hence convergence) intact while
    avoiding the long plateaus of fixed steps.  The returned point is the
    best feasible iterate seen, which also makes the recorded objective
    trace non-increasing.
    """
    opts = opts or SolverOptions()
    a, y, eps = model.A, model.y, model.epsilon
    if a.shape[1] != frame.n:
        raise ContractViolation("matrix columns != frame dimension")
    dmat = frame.matrix
    d, m = frame.d, a.shape[0]

    norm_a = operator_norm(a, iters=200, seed=opts.seed)
    big_k = math.sqrt(1.0 + (norm_a * (1.0 + 1e-6)) ** 2)
    tau = sigma = 0.99 / big_k

    if float(np.linalg.norm(y)) <= eps:
        # zero is feasible and no point has a smaller objective
        return RecoveryResult(
            f_hat=np.zeros(a.shape[1]), iterations=0, converged=True,
            residual=float(np.linalg.norm(y)), objective=0.0,
            program=PROGRAM_P1,
            diagnostics={"tau": tau, "sigma": sigma, "operator_norm": norm_a,
                         "final_step": 0.0, "final_violation": 0.0,
                         "objective_trace": [0.0], "note": "zero_feasible"},
        )

    stacked = np.vstack([dmat.T, a])  # (d + m) x n
    f, _ = least_squares_min_norm(a, y)
    feas_tol = _feasibility_tol(eps, opts.tol)

    def evaluate(candidate):
        image = stacked @ candidate
        obj = float(np.abs(image[:d]).sum())
        res = float(np.linalg.norm(image[d:] - y))
        return obj, res

    best_obj, best_res = math.inf, math.inf
    best_f = None
    obj0, res0 = evaluate(f)
    if res0 - eps <= feas_tol:
        best_obj, best_res, best_f = obj0, res0, f.copy()
    trace = [best_obj if best_f is not None else obj0]

    p = np.zeros(d)
    r = np.zeros(m)
    f_bar = f.copy()
    converged = False
    iterations = 0
    step = math.inf
    viol = max(0.0, res0 - eps)
    balance = 0.5  # diminishing rebalancing strength

    for iterations in range(1, opts.max_iters + 1):
        image_bar = stacked @ f_bar
        p_new = np.clip(p + sigma * image_bar[:d], -1.0, 1.0)
        w = r + sigma * (image_bar[d:] - y)
        norm_w = float(np.linalg.norm(w))
        if norm_w > 0.0 and eps > 0.0:
            r_new = w * max(0.0, 1.0 - sigma * eps / norm_w)
        else:
            r_new = w
        dual_new = np.concatenate([p_new, r_new])
        f_new = f - tau * (stacked.T @ dual_new)
        step = float(np.linalg.norm(f_new - f))
        ref = 1.0 + float(np.linalg.norm(f))

        if iterations % 10 == 0 and balance > 1e-4:
            dual_step = np.concatenate([p, r]) - dual_new
            primal_res = np.linalg.norm((f - f_new) / tau - stacked.T @ dual_step)
            dual_res = np.linalg.norm(dual_step / sigma - stacked @ (f - f_new))
            if primal_res > 2.0 * dual_res:
                tau *= 1.0 + balance
                sigma /= 1.0 + balance
                balance *= 0.95
            elif dual_res > 2.0 * primal_res:
                tau /= 1.0 + balance
                sigma *= 1.0 + balance
                balance *= 0.95

        f_bar = 2.0 * f_new - f
        f = f_new
        p, r = p_new, r_new

        obj, res = evaluate(f)
        viol = max(0.0, res - eps)
        if viol <= feas_tol and obj < best_obj:
            best_obj, best_res, best_f = obj, res, f.copy()
        trace.append(best_obj if best_f is not None else obj)

        if step <= opts.tol * ref and viol <= feas_tol:
            converged = True
            break

    if best_f is None:
        f_hat, residual = f, evaluate(f)[1]
        converged = False
    else:
        f_hat, residual = best_f, best_res
    objective = float(np.abs(dmat.T @ f_hat).sum())
    return RecoveryResult(
        f_hat=f_hat, iterations=iterations, converged=converged,
        residual=residual, objective=objective, program=PROGRAM_P1,
        diagnostics={
            "tau": tau, "sigma": sigma, "operator_norm": norm_a,
            "final_step": step, "final_violation": viol,
            "objective_trace": trace,
        },
    )


def _smoothed_objective(coeffs: np.ndarray, mu: float, q: float) -> float:
    return float(np.sum((coeffs * coeffs + mu * mu) ** (q / 2.0)))


def solve_pq(frame: TightFrame, model: SensingModel, q: float,
             opts: Optional[SolverOptions] = None) -> RecoveryResult:
    """Iteratively reweighted least squares for the lq analysis program.

    Weights w_i = ((D* f)_i^2 + mu^2)^(q/2 - 1) at smoothing level mu, which
    decays geometrically to the floor.  The noiseless weighted subproblem is
    solved exactly on the affine set A f = y (null-space reduction keeps the
    conditioning at sqrt of the weight spread); with eps > 0 a penalty weight
    lambda is calibrated by bisection until the residual lands in
    [eps (1 - 1e-3), eps].
    """
    if not 0.0 < q < 1.0:
        raise ContractViolation("solve_pq needs 0 < q < 1")
    opts = opts or SolverOptions()
    a, y, eps = model.A, model.y, model.epsilon
    if a.shape[1] != frame.n:
        raise ContractViolation("matrix columns != frame dimension")
    dmat = frame.matrix

    def result(f, iters, converged, extra):
        coeffs = dmat.T @ f
        return RecoveryResult(
            f_hat=f, iterations=iters, converged=converged,
            residual=float(np.linalg.norm(a @ f - y)),
            objective=float(np.sum(np.abs(coeffs) ** q)),
            program=PROGRAM_PQ, diagnostics=extra,
        )

    norm_y = float(np.linalg.norm(y))
    if norm_y <= eps:
        # zero is feasible, and no point beats objective 0
        return result(np.zeros(a.shape[1]), 1, True, {"note": "zero_feasible"})

    f0, res0 = least_squares_min_norm(a, y)
    if res0 > eps + _feasibility_tol(eps, opts.tol):
        return result(f0, 0, False, {"note": "no_feasible_point", "min_residual": res0})

    if eps == 0.0:
        # null-space parametrization of {f : A f = y}
        _, svals, vt = np.linalg.svd(a, full_matrices=True)
        rank = int(np.count_nonzero(svals > 1e-12 * (svals[0] if svals.size else 1.0)))
        null_basis = vt[rank:].T  # n x (n - rank)
    else:
        null_basis = None

    def weighted_solve(weights, lam_start):
        root_w = np.sqrt(weights)
        if eps == 0.0:
            if null_basis.shape[1] == 0:
                return f0, lam_start
            lhs = (root_w[:, None] * dmat.T) @ null_basis
            rhs = -(root_w * (dmat.T @ f0))
            c, _ = least_squares_min_norm(lhs, rhs)
            return f0 + null_basis @ c, lam_start

        def solve_at(lam):
            top = root_w[:, None] * dmat.T
            bottom = math.sqrt(lam) * a
            rhs = np.concatenate([np.zeros(dmat.shape[1]), math.sqrt(lam) * y])
            f_lam, _ = least_squares_min_norm(np.vstack([top, bottom]), rhs)
            return f_lam, float(np.linalg.norm(a @ f_lam - y))

        # the residual is decreasing in lam; drive it onto the constraint
        # boundary (well inside [eps (1 - 1e-3), eps]) so each weighted solve
        # is the exact ball-constrained minimizer -- that exactness is what
        # makes the majorize-minimize descent and the outer fixed point clean
        lam_hi = max(lam_start, 1e-12)
        f_hi, res_hi = solve_at(lam_hi)
        grow = 0
        while res_hi > eps and grow < 120:
            lam_hi *= 4.0
            f_hi, res_hi = solve_at(lam_hi)
            grow += 1
        lam_lo = lam_hi / 4.0 if grow else 0.0
        for _ in range(50):
            lam_mid = 0.5 * (lam_lo + lam_hi) if lam_lo > 0.0 else lam_hi / 2.0
            f_mid, res_mid = solve_at(lam_mid)
            if res_mid > eps:
                lam_lo = lam_mid
            else:
                lam_hi, f_hi, res_hi = lam_mid, f_mid, res_mid
        return f_hi, lam_hi

    f = f0
    mu = max(float(np.abs(dmat.T @ f0).max()), opts.smoothing_floor)
    lam = 1.0
    total_solves = 0
    level_traces = []
    converged = False
    f_prev_level = None
    inner_cap = 25

    while total_solves < opts.max_iters:
        level_trace = []
        for _ in range(inner_cap):
            coeffs = dmat.T @ f
            weights = (coeffs * coeffs + mu * mu) ** (q / 2.0 - 1.0)
            f_new, lam = weighted_solve(weights, lam)
            total_solves += 1
            level_trace.append(_smoothed_objective(dmat.T @ f_new, mu, q))
            inner_step = float(np.linalg.norm(f_new - f))
            inner_ref = 1.0 + float(np.linalg.norm(f))
            f = f_new
            if inner_step <= opts.tol * inner_ref or total_solves >= opts.max_iters:
                break
        level_traces.append(level_trace)
        if f_prev_level is not None:
            level_step = float(np.linalg.norm(f - f_prev_level))
            if level_step <= opts.tol * (1.0 + float(np.linalg.norm(f_prev_level))):
                converged = True
                break
        f_prev_level = f.copy()
        mu = max(opts.continuation_factor * mu, opts.smoothing_floor)

    return result(f, total_solves, converged, {
        "mu_final": mu, "lambda_final": lam if eps > 0 else None,
        "levels": len(level_traces), "level_traces": level_traces,
    })


def solve_p0_oracle(frame: TightFrame, model: SensingModel, s_max: int,
                    tol: float = 1e-9) -> RecoveryResult:
    """Exhaustive search for the sparsest analysis representation.

    Supports are enumerated in increasing size, lexicographically within a
    size; the first support whose stacked system {D*_{T^c} f = 0, A f = y}
    is solvable within `tol` wins.  The reported objective counts the
    entries of D* f_hat above `tol` in magnitude.
    """
    if model.epsilon > 0:
        raise ContractViolation("the l0 oracle is noiseless; got epsilon > 0")
    a, y = model.A, model.y
    if a.shape[1] != frame.n:
        raise ContractViolation("matrix columns != frame dimension")
    d = frame.d
    if not 0 <= s_max <= d:
        raise ContractViolation("s_max must be in [0, d]")
    budget = sum(math.comb(d, k) for k in range(s_max + 1))
    if budget > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            "%d supports exceed the exact budget %d" % (budget, ENUMERATION_LIMIT)
        )
    dmat = frame.matrix
    tested = 0
    for size in range(s_max + 1):
        for support in combinations(range(d), size):
            tested += 1
            comp = [i for i in range(d) if i not in support]
            stacked = np.vstack([dmat[:, comp].T, a]) if comp else a
            rhs = np.concatenate([np.zeros(len(comp)), y]) if comp else y
            f, residual = least_squares_min_norm(stacked, rhs)
            if residual <= tol:
                coeffs = dmat.T @ f
                return RecoveryResult(
                    f_hat=f, iterations=tested, converged=True,
                    residual=float(np.linalg.norm(a @ f - y)),
                    objective=float(np.count_nonzero(np.abs(coeffs) > tol)),
                    program=PROGRAM_P0,
                    diagnostics={"support": list(support),
                                 "stacked_residual": residual},
                )
    f, _ = least_squares_min_norm(a, y)
    coeffs = dmat.T @ f
    return RecoveryResult(
        f_hat=f, iterations=tested, converged=False,
        residual=float(np.linalg.norm(a @ f - y)),
        objective=float(np.count_nonzero(np.abs(coeffs) > tol)),
        program=PROGRAM_P0,
        diagnostics={"note": "no feasible support up to s_max=%d" % s_max},
    )
