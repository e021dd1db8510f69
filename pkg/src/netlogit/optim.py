"""Proximal gradient descent with backtracking line search.

Minimizes loss(gamma) + lam * ||theta||_1 over gamma = (beta, theta).
Steps soft-threshold the theta block of a plain gradient step; the beta
coordinate is unpenalized by default, optionally penalized, or frozen at
a fixed value. The step size starts at t0 and only ever shrinks: whenever
the quadratic majorization test fails the step is rejected and t is
multiplied by tau.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError
from .model import ModelParams

__all__ = ["SolverConfig", "FitResult", "soft_threshold", "prox_step", "line_search_ok", "fit"]


@dataclass
class SolverConfig:
    lam: float
    tau: float = 0.8
    delta_tol: float = 1e-3
    t0: float = 1.0
    max_iters: int = 100_000
    penalize_beta: bool = False
    fixed_beta: float | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("penalty must be nonnegative")
        if not 0 < self.tau < 1:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.delta_tol <= 0 or self.t0 <= 0:
            raise ValueError("tolerance and initial step must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


@dataclass
class FitResult:
    gamma_hat: ModelParams
    n_iters: int
    n_backtracks: int
    final_step: float
    objective_trace: np.ndarray
    kkt: tuple
    converged: bool

    @property
    def gamma_vector(self):
        return self.gamma_hat.as_vector()


def soft_threshold(v, kappa):
    """Componentwise sign(v) * max(|v| - kappa, 0)."""
    if kappa < 0:
        raise ValueError("threshold must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)


def _apply_prox(step, kappa, config, gamma):
    """Prox of the penalty at the gradient step; beta handled per config."""
    out = np.empty_like(step)
    out[1:] = soft_threshold(step[1:], kappa)
    if config.fixed_beta is not None:
        out[0] = gamma[0]
    elif config.penalize_beta:
        out[0] = soft_threshold(step[:1], kappa)[0]
    else:
        out[0] = step[0]
    return out


def prox_step(problem, gamma, t, config):
    """One proximal gradient step of size t from gamma."""
    if t <= 0:
        raise ValueError("step size must be positive")
    gamma = np.asarray(gamma, dtype=np.float64)
    g = problem.gradient(gamma)
    if not np.isfinite(g).all():
        raise NonFiniteError("gradient is not finite")
    return _apply_prox(gamma - t * g, t * config.lam, config, gamma)


def line_search_ok(problem, gamma, t, config):
    """Quadratic majorization test for the composite gradient map at step t."""
    gamma = np.asarray(gamma, dtype=np.float64)
    g = problem.gradient(gamma)
    if not np.isfinite(g).all():
        raise NonFiniteError("gradient is not finite")
    cand = _apply_prox(gamma - t * g, t * config.lam, config, gamma)
    gmap = (gamma - cand) / t
    lhs = problem.loss(cand)
    rhs = problem.loss(gamma) - t * float(g @ gmap) + 0.5 * t * float(gmap @ gmap)
    return lhs <= rhs


def _objective(problem, gamma, loss_val, config):
    pen = config.lam * np.abs(gamma[1:]).sum()
    if config.penalize_beta and config.fixed_beta is None:
        pen += config.lam * abs(gamma[0])
    return loss_val + pen


def fit(problem, config, gamma0=None):
    """Solve the penalized problem by proximal gradient descent.

    Starts from zero (or a warm start), step size t0. Accepted steps keep
    the step size; rejected steps shrink it by tau and leave the iterate
    unchanged. Stops when an accepted step moves less than delta_tol in
    l1 norm, or after max_iters loop passes (converged=False).

    Parameters
    ----------
    problem : PseudoLikelihoodProblem
    config : SolverConfig
    gamma0 : optional warm-start vector of length d + 1.

    Returns
    -------
    FitResult with the estimate, iteration counts, the objective value at
    every accepted step (non-increasing), KKT residuals, and a convergence
    flag.
    """
    d1 = problem.d + 1
    if gamma0 is None:
        gamma = np.zeros(d1)
    else:
        gamma = np.asarray(gamma0, dtype=np.float64).copy()
        if gamma.size != d1:
            raise ValueError(f"warm start must have length {d1}")
    if config.fixed_beta is not None:
        gamma[0] = config.fixed_beta

    t = config.t0
    kappa = t * config.lam
    loss_cur = problem.loss(gamma)
    grad_cur = problem.gradient(gamma)
    if not np.isfinite(grad_cur).all():
        raise NonFiniteError("gradient is not finite at the starting point")
    trace = [_objective(problem, gamma, loss_cur, config)]
    accepted = 0
    backtracks = 0
    converged = False

    for _ in range(config.max_iters):
        cand = _apply_prox(gamma - t * grad_cur, kappa, config, gamma)
        gmap = (gamma - cand) / t
        loss_cand = problem.loss(cand)
        rhs = loss_cur - t * float(grad_cur @ gmap) + 0.5 * t * float(gmap @ gmap)
        if loss_cand <= rhs:
            delta = float(np.abs(cand - gamma).sum())
            gamma = cand
            loss_cur = loss_cand
            grad_cur = problem.gradient(gamma)
            if not np.isfinite(grad_cur).all():
                raise NonFiniteError("gradient is not finite")
            accepted += 1
            trace.append(_objective(problem, gamma, loss_cur, config))
            if delta <= config.delta_tol:
                converged = True
                break
        else:
            t *= config.tau
            kappa = t * config.lam
            backtracks += 1

    if config.fixed_beta is not None:
        # beta is not an optimization variable here, so no stationarity
        # requirement applies to it
        _, theta_resid = problem.kkt_residuals(gamma, config.lam)
        kkt = (0.0, theta_resid)
    else:
        kkt = problem.kkt_residuals(
            gamma, config.lam, penalize_beta=config.penalize_beta
        )

    return FitResult(
        gamma_hat=ModelParams.from_vector(gamma),
        n_iters=accepted,
        n_backtracks=backtracks,
        final_step=t,
        objective_trace=np.asarray(trace),
        kkt=kkt,
        converged=converged,
    )
