"""Synthetic covariates and sparse signal vectors for experiments."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianAR",
    "GaussianIdentity",
    "FromFile",
    "CovariateSpec",
    "UniformShell",
    "Explicit",
    "ThetaSpec",
    "gen_covariates",
    "gen_theta",
    "save_covariates",
    "load_covariates",
]


@dataclass
class GaussianAR:
    """Gaussian rows with covariance rho^|i-j| between columns i and j."""

    rho: float

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise ValueError("|rho| must be below 1")


@dataclass
class GaussianIdentity:
    """Independent standard-normal columns."""


@dataclass
class FromFile:
    """Covariates read from a CSV file, one node per row."""

    path: str


@dataclass
class CovariateSpec:
    d: int
    kind: object

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("covariate dimension must be positive")


def gen_covariates(spec, n, seed=0):
    """Draw an (n, d) covariate matrix, deterministic given seed.

    The AR kind uses the recursion z_1 = xi_1, z_j = rho z_{j-1}
    + sqrt(1 - rho^2) xi_j with i.i.d. standard-normal xi, which
    realizes the geometric covariance exactly in O(n d).
    """
    if n < 1:
        raise ValueError("need at least one row")
    kind = spec.kind
    if isinstance(kind, FromFile):
        z = load_covariates(kind.path)
        if z.shape != (n, spec.d):
            raise ValueError(
                f"file covariates have shape {z.shape}, expected {(n, spec.d)}"
            )
        return z
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((n, spec.d))
    if isinstance(kind, GaussianIdentity):
        return xi
    if isinstance(kind, GaussianAR):
        rho = kind.rho
        z = np.empty_like(xi)
        z[:, 0] = xi[:, 0]
        scale = np.sqrt(1.0 - rho * rho)
        for j in range(1, spec.d):
            z[:, j] = rho * z[:, j - 1] + scale * xi[:, j]
        return z
    raise TypeError(f"unknown covariate kind: {type(kind).__name__}")


@dataclass
class UniformShell:
    """Magnitudes uniform on [lo, hi], signs by fair coin."""

    lo: float = 0.5
    hi: float = 1.0

    def __post_init__(self):
        if not 0 < self.lo <= self.hi:
            raise ValueError("need 0 < lo <= hi")


@dataclass
class Explicit:
    values: object


@dataclass
class ThetaSpec:
    d: int
    s: int
    signal: object = None

    def __post_init__(self):
        if not 0 <= self.s <= self.d:
            raise ValueError("sparsity must be between 0 and d")
        if self.signal is None:
            self.signal = UniformShell()


def gen_theta(spec, seed=0):
    """Signal on the first s coordinates, exact zeros elsewhere."""
    theta = np.zeros(spec.d)
    if spec.s == 0:
        return theta
    if isinstance(spec.signal, Explicit):
        vals = np.asarray(spec.signal.values, dtype=np.float64).ravel()
        if vals.size != spec.s:
            raise ValueError("explicit signal length must equal s")
        theta[: spec.s] = vals
        return theta
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=spec.s) * 2 - 1
    mags = rng.uniform(spec.signal.lo, spec.signal.hi, size=spec.s)
    theta[: spec.s] = signs * mags
    return theta


def save_covariates(path, z):
    np.savetxt(path, np.asarray(z, dtype=np.float64), delimiter=",", fmt="%.17g")


def load_covariates(path):
    z = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    if not np.isfinite(z).all():
        raise ValueError("covariates must be finite")
    return z
