"""Regularization paths and BIC-based penalty selection."""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import NoConvergedFitError
from .model import ModelParams
from .optim import fit

__all__ = [
    "LambdaGrid",
    "PathPoint",
    "PathResult",
    "solution_path",
    "bic",
    "select",
    "beta_only_minimizer",
    "full_shrinkage_lambda",
    "write_path_csv",
]


@dataclass
class LambdaGrid:
    """Strictly decreasing positive penalty values."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if vals.size == 0:
            raise ValueError("grid must be nonempty")
        if (vals <= 0).any():
            raise ValueError("grid values must be positive")
        if vals.size > 1 and not (np.diff(vals) < 0).all():
            raise ValueError("grid values must be strictly decreasing")
        self.values = vals

    @classmethod
    def geometric(cls, lo, hi, count):
        """Geometric sequence of `count` values from hi down to lo."""
        if not 0 < lo < hi:
            raise ValueError("need 0 < lo < hi")
        if count < 2:
            raise ValueError("geometric grid needs at least two points")
        return cls(np.geomspace(hi, lo, count))

    @classmethod
    def explicit(cls, values):
        return cls(np.sort(np.asarray(values, dtype=np.float64))[::-1].copy())

    @classmethod
    def theory_scaled(cls, delta, n, d):
        """Single point delta * sqrt(log(d + 1) / n)."""
        return cls(np.array([delta * math.sqrt(math.log(d + 1) / n)]))

    def __len__(self):
        return self.values.size


@dataclass
class PathPoint:
    lam: float
    gamma_hat: ModelParams
    df: int
    bic: float
    loss: float
    kkt: tuple
    converged: bool


@dataclass
class PathResult:
    points: list
    selected_index: int | None

    def __len__(self):
        return len(self.points)

    def coefficient_matrix(self):
        """Theta estimates stacked as (n_lambda, d)."""
        return np.vstack([p.gamma_hat.theta for p in self.points])

    def lambdas(self):
        return np.array([p.lam for p in self.points])


def degrees_of_freedom(theta):
    """Count of exactly nonzero coefficients."""
    return int(np.count_nonzero(np.asarray(theta)))


def bic(problem, gamma_hat, n, classical=False):
    """Per-node-average loss plus df * log n.

    With classical=True the likelihood term is rescaled to 2 n * loss,
    the usual deviance scaling.
    """
    gamma = (
        gamma_hat.as_vector() if isinstance(gamma_hat, ModelParams) else gamma_hat
    )
    loss = problem.loss(gamma)
    df = degrees_of_freedom(np.asarray(gamma).ravel()[1:])
    term = 2.0 * n * loss if classical else loss
    return term + df * math.log(n)


def solution_path(problem, grid, config, warm_start=True, classical_bic=False):
    """Fit every grid value from largest to smallest penalty.

    Each fit warm-starts from the previous solution by default. A fit
    that stops at max_iters is recorded with converged=False rather than
    raising. Returns a PathResult whose selected_index is the argmin-BIC
    converged point, ties broken toward the larger penalty; None when no
    point converged.
    """
    points = []
    prev = None
    for lam in grid.values:
        cfg = replace(config, lam=float(lam))
        res = fit(problem, cfg, gamma0=prev if warm_start else None)
        gamma = res.gamma_vector
        if warm_start:
            prev = gamma
        loss = problem.loss(gamma)
        df = degrees_of_freedom(gamma[1:])
        term = 2.0 * problem.n * loss if classical_bic else loss
        points.append(
            PathPoint(
                lam=float(lam),
                gamma_hat=res.gamma_hat,
                df=df,
                bic=term + df * math.log(problem.n),
                loss=loss,
                kkt=res.kkt,
                converged=res.converged,
            )
        )
    selected = None
    for i, p in enumerate(points):
        if p.converged and (selected is None or p.bic < points[selected].bic):
            selected = i
    return PathResult(points=points, selected_index=selected)


def select(path):
    """Penalty and estimate minimizing BIC among converged grid points."""
    if path.selected_index is None:
        raise NoConvergedFitError("no converged fit along the path")
    p = path.points[path.selected_index]
    return p.lam, p.gamma_hat


def beta_only_minimizer(problem, bracket=1.0, max_bracket=1e6):
    """Minimize the loss over beta alone with theta = 0."""
    m = problem.m
    if not m.any():
        return 0.0

    def dbeta(b):
        gamma = np.zeros(problem.d + 1)
        gamma[0] = b
        return problem.gradient(gamma)[0]

    lo, hi = -bracket, bracket
    while dbeta(lo) > 0 and lo > -max_bracket:
        lo *= 2
    while dbeta(hi) < 0 and hi < max_bracket:
        hi *= 2
    if dbeta(lo) > 0 or dbeta(hi) < 0:
        raise ValueError("no stationary beta in bracket; data may be separable")
    return float(brentq(dbeta, lo, hi, xtol=1e-12))


def full_shrinkage_lambda(problem, fixed_beta=None):
    """Smallest penalty at which theta = 0 satisfies the optimality
    conditions (with beta at its own minimizer, or frozen)."""
    b0 = beta_only_minimizer(problem) if fixed_beta is None else fixed_beta
    gamma = np.zeros(problem.d + 1)
    gamma[0] = b0
    g = problem.gradient(gamma)
    return float(np.abs(g[1:]).max())


def _fmt(v):
    return repr(float(v))


def write_path_csv(path_result, out):
    """Write one row per grid point.

    Columns: lambda, log_lambda, df, bic, loss, beta_hat,
    theta_hat_1..theta_hat_d, converged. Floats use shortest
    round-trip formatting so identical runs give identical bytes.
    """
    points = path_result.points
    d = points[0].gamma_hat.d if points else 0
    header = ["lambda", "log_lambda", "df", "bic", "loss", "beta_hat"]
    header += [f"theta_hat_{j}" for j in range(1, d + 1)]
    header += ["converged"]

    def rows():
        yield ",".join(header) + "\n"
        for p in points:
            cells = [
                _fmt(p.lam),
                _fmt(math.log(p.lam)),
                str(p.df),
                _fmt(p.bic),
                _fmt(p.loss),
                _fmt(p.gamma_hat.beta),
            ]
            cells += [_fmt(v) for v in p.gamma_hat.theta]
            cells += ["true" if p.converged else "false"]
            yield ",".join(cells) + "\n"

    if hasattr(out, "write"):
        for line in rows():
            out.write(line)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            for line in rows():
                fh.write(line)
