"""Negative log-pseudo-likelihood: value, gradient, Hessian, and diagnostics.

All quantities are per-node averages over the conditional log-likelihoods
-log P(x_i | rest) with field h_i = theta . z_i + beta * m_i(x). Parameters
are passed as flat vectors gamma = (beta, theta_1, ..., theta_d).
"""

from collections import namedtuple

import numpy as np

from .errors import DimensionMismatchError, NonFiniteError, TooLargeError
from .model import as_spins

__all__ = ["PseudoLikelihoodProblem", "GradHess"]

GradHess = namedtuple("GradHess", ["grad", "hess"])

LOG2 = np.log(2.0)
MAX_DIM = 5000


def _logcosh(h):
    # |h| + log1p(e^{-2|h|}) - log 2 never overflows
    ah = np.abs(h)
    return ah + np.log1p(np.exp(-2.0 * ah)) - LOG2


def _sech_sq(h):
    t = np.exp(-np.abs(h))
    return (2.0 * t / (1.0 + t * t)) ** 2


class PseudoLikelihoodProblem:
    """One observed configuration with its network and covariates.

    Local fields m_i = sum_j a_ij x_j are cached at construction; the
    configuration is treated as fixed for the lifetime of the problem.
    All evaluation methods are read-only and safe to call concurrently.
    """

    def __init__(self, a, z, x):
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2 or z.shape[0] != a.n:
            raise DimensionMismatchError("covariate matrix must be (n, d)")
        if not np.isfinite(z).all():
            raise NonFiniteError("covariates must be finite")
        self.a = a
        self.z = z
        self.x = as_spins(x, a.n).astype(np.float64)
        self.m = a.dot(self.x)

    @property
    def n(self):
        return self.z.shape[0]

    @property
    def d(self):
        return self.z.shape[1]

    def refresh_local_fields(self):
        self.m = self.a.dot(self.x)

    def _gamma(self, gamma):
        gamma = np.asarray(gamma, dtype=np.float64).ravel()
        if gamma.size != self.d + 1:
            raise DimensionMismatchError(
                f"gamma must have length {self.d + 1}, got {gamma.size}"
            )
        if not np.isfinite(gamma).all():
            raise NonFiniteError("gamma must be finite")
        return gamma

    def fields(self, gamma):
        """h_i = theta . z_i + beta * m_i for every node."""
        gamma = self._gamma(gamma)
        return gamma[0] * self.m + self.z @ gamma[1:]

    def loss(self, gamma):
        """Average negative conditional log-likelihood; nonnegative."""
        h = self.fields(gamma)
        val = float(-np.mean(self.x * h - _logcosh(h)) + LOG2)
        if not np.isfinite(val):
            raise NonFiniteError("loss evaluated to a non-finite value")
        return val

    def gradient(self, gamma):
        """Gradient wrt (beta, theta); one pass via residuals x_i - tanh h_i."""
        h = self.fields(gamma)
        r = self.x - np.tanh(h)
        out = np.empty(self.d + 1)
        out[0] = -float(self.m @ r) / self.n
        out[1:] = -(self.z.T @ r) / self.n
        return out

    def _design(self):
        return np.column_stack([self.m, self.z])

    def hessian(self, gamma):
        """Average of sech^2(h_i)-weighted outer products; symmetric PSD."""
        if self.d > MAX_DIM:
            raise TooLargeError(f"dense Hessian limited to d <= {MAX_DIM}")
        h = self.fields(gamma)
        w = _sech_sq(h)
        u = self._design()
        return (u.T * w) @ u / self.n

    def grad_hess(self, gamma):
        return GradHess(self.gradient(gamma), self.hessian(gamma))

    def gram_matrix(self):
        """Unweighted Gram of (m_i, z_i); equals the Hessian at gamma = 0."""
        if self.d > MAX_DIM:
            raise TooLargeError(f"dense Gram limited to d <= {MAX_DIM}")
        u = self._design()
        return u.T @ u / self.n

    def lipschitz_bound(self):
        """Largest eigenvalue of the Gram matrix; bounds the gradient's
        Lipschitz constant over all gamma."""
        return float(np.linalg.eigvalsh(self.gram_matrix()).max())

    def gram_min_eig(self):
        """Smallest Gram eigenvalue; the strong-convexity diagnostic."""
        return float(np.linalg.eigvalsh(self.gram_matrix()).min())

    def kkt_residuals(self, gamma_hat, lam, penalize_beta=False):
        """First-order optimality violations at a candidate minimizer.

        Returns (beta_resid, theta_max_resid). The beta coordinate is
        unpenalized by default, so its residual is the plain gradient
        magnitude. For each theta coordinate the residual is the distance
        to the subgradient condition of the l1 penalty at level lam.
        """
        gamma_hat = self._gamma(gamma_hat)
        g = self.gradient(gamma_hat)

        def sub_resid(gvals, coefs):
            active = np.abs(gvals + lam * np.sign(coefs))
            inactive = np.maximum(0.0, np.abs(gvals) - lam)
            return np.where(coefs != 0.0, active, inactive)

        if penalize_beta:
            beta_resid = float(sub_resid(g[:1], gamma_hat[:1])[0])
        else:
            beta_resid = abs(float(g[0]))
        theta_r = sub_resid(g[1:], gamma_hat[1:])
        theta_resid = float(theta_r.max()) if theta_r.size else 0.0
        return beta_resid, theta_resid
