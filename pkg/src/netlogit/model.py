"""Ising-with-covariates model: conditionals, Gibbs sampling, exact enumeration.

The joint law over spin vectors x in {-1,+1}^n is proportional to

    exp( beta * sum_{u<v} a_uv x_u x_v  +  sum_i x_i (theta . z_i) )

with each unordered pair counted once, which is the unique joint compatible
with the single-site conditional P(x_i = +1 | rest) = sigmoid(2 h_i),
h_i = theta . z_i + beta * m_i(x), m_i(x) = sum_j a_ij x_j. The Gibbs sampler,
the exact enumerator, and the pseudo-likelihood all use this h_i.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, TooLargeError

__all__ = [
    "ModelParams",
    "as_spins",
    "local_field",
    "conditional_prob_plus",
    "conditional_prob_minus",
    "gibbs_sample",
    "gibbs_chain",
    "exact_distribution",
    "detailed_balance_check",
    "index_to_spins",
    "spins_to_index",
    "save_spins",
    "load_spins",
]

ENUM_MAX_SITES = 20
BALANCE_MAX_SITES = 12


@dataclass
class ModelParams:
    """Dependence strength plus regression coefficients."""

    beta: float
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64).ravel()
        if not np.isfinite(self.beta) or not np.isfinite(self.theta).all():
            raise ValueError("model parameters must be finite")

    @property
    def d(self):
        return self.theta.size

    def as_vector(self):
        """(beta, theta_1, ..., theta_d) as a flat array."""
        return np.concatenate([[self.beta], self.theta])

    @classmethod
    def from_vector(cls, gamma):
        gamma = np.asarray(gamma, dtype=np.float64).ravel()
        return cls(beta=float(gamma[0]), theta=gamma[1:].copy())


def as_spins(x, n=None):
    """Validate a +/-1 configuration, returning an int8 array."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise DimensionMismatchError("spin configuration must be one-dimensional")
    if n is not None and arr.size != n:
        raise DimensionMismatchError(f"expected {n} spins, got {arr.size}")
    if not np.isin(arr, (-1, 1)).all():
        raise ValueError("spins must be -1 or +1")
    return arr.astype(np.int8)


def _check_dims(params, a, z):
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2:
        raise DimensionMismatchError("covariate matrix must be 2-D")
    if z.shape[0] != a.n:
        raise DimensionMismatchError("covariate rows must match matrix dimension")
    if z.shape[1] != params.d:
        raise DimensionMismatchError("theta length must match covariate columns")
    if not np.isfinite(z).all():
        raise ValueError("covariates must be finite")
    return z


def local_field(a, x, i):
    """m_i(x) = sum_j a_ij x_j over the sparse row of a."""
    if not 0 <= i < a.n:
        raise IndexError(f"vertex {i} out of range for n={a.n}")
    idx, vals = a.row(i)
    if idx.size == 0:
        return 0.0
    return float(vals @ np.asarray(x, dtype=np.float64)[idx])


def _sigmoid(t):
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    et = math.exp(t)
    return et / (1.0 + et)


def conditional_prob_plus(params, a, z, x, i):
    """P(x_i = +1 | rest) = sigmoid(2 h_i), computed without overflow."""
    z = _check_dims(params, a, z)
    x = as_spins(x, a.n)
    h = float(params.theta @ z[i]) + params.beta * local_field(a, x, i)
    return _sigmoid(2.0 * h)


def conditional_prob_minus(params, a, z, x, i):
    """P(x_i = -1 | rest); sigmoid at the negated field, realized as the
    exact complement so the pair always sums to 1."""
    return 1.0 - conditional_prob_plus(params, a, z, x, i)


def _adjacency_lists(a):
    """CSR rows as Python lists for the tight sampling loop."""
    mat = a.matrix
    indptr, indices, data = mat.indptr, mat.indices.tolist(), mat.data.tolist()
    rows = []
    for i in range(a.n):
        lo, hi = indptr[i], indptr[i + 1]
        rows.append(list(zip(indices[lo:hi], data[lo:hi])))
    return rows


def _run_chain(params, a, z, n_updates, init, scan, seed, collect_every=0):
    """Single-site Gibbs updates; optionally collect the state periodically."""
    z = _check_dims(params, a, z)
    n = a.n
    if n_updates < 0:
        raise ValueError("number of updates must be nonnegative")
    if init is None:
        x = [1] * n
    else:
        x = [int(v) for v in as_spins(init, n)]
    rng = np.random.default_rng(seed)
    if scan == "random":
        sites = rng.integers(0, n, size=n_updates).tolist()
    elif scan == "systematic":
        sites = [k % n for k in range(n_updates)]
    else:
        raise ValueError("scan must be 'random' or 'systematic'")
    us = rng.random(n_updates).tolist()

    fields = (z @ params.theta).tolist()
    rows = _adjacency_lists(a)
    m = list(map(float, a.dot(np.array(x, dtype=np.float64))))
    beta = float(params.beta)
    exp = math.exp

    collected = []
    for k in range(n_updates):
        i = sites[k]
        t = -2.0 * (fields[i] + beta * m[i])
        if t < 0.0:
            p = 1.0 / (1.0 + exp(t))
        else:
            et = exp(-t)
            p = et / (1.0 + et)
        new = 1 if us[k] < p else -1
        old = x[i]
        if new != old:
            d = new - old
            for j, w in rows[i]:
                m[j] += w * d
            x[i] = new
        if collect_every and (k + 1) % collect_every == 0:
            collected.append(list(x))

    final = np.array(x, dtype=np.int8)
    if collect_every:
        return final, np.array(collected, dtype=np.int8)
    return final, None


def gibbs_sample(params, a, z, n_iters, init=None, scan="random", seed=0):
    """Run n_iters single-site updates and return the final configuration.

    Random scan picks a uniformly random vertex per update; init defaults
    to the all-plus configuration. Deterministic given seed.
    """
    final, _ = _run_chain(params, a, z, n_iters, init, scan, seed)
    return final


def gibbs_chain(params, a, z, n_updates, thin, init=None, scan="random", seed=0):
    """Collect the state every `thin` updates; returns an array (k, n)."""
    if thin < 1:
        raise ValueError("thin must be at least 1")
    _, collected = _run_chain(
        params, a, z, n_updates, init, scan, seed, collect_every=thin
    )
    return collected


def index_to_spins(idx, n):
    """Decode state index to spins; bit i of idx gives the sign of site i."""
    idx = np.asarray(idx, dtype=np.int64)
    bits = (idx[..., None] >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.int8)


def spins_to_index(x):
    x = np.asarray(x)
    return int(((x > 0).astype(np.int64) << np.arange(x.size)).sum())


def exact_distribution(params, a, z):
    """Probability of every spin configuration by direct enumeration.

    Returns a vector of length 2^n indexed per index_to_spins. Guarded to
    n <= 20 sites.
    """
    z = _check_dims(params, a, z)
    n = a.n
    if n > ENUM_MAX_SITES:
        raise TooLargeError(f"enumeration limited to {ENUM_MAX_SITES} sites")
    fields = z @ params.theta
    dense = a.toarray()
    total = 1 << n
    logmass = np.empty(total)
    chunk = 1 << 16
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        spins = index_to_spins(np.arange(lo, hi), n).astype(np.float64)
        # each unordered pair once: (beta/2) x'Ax with symmetric A
        quad = 0.5 * np.einsum("si,si->s", spins @ dense, spins)
        logmass[lo:hi] = params.beta * quad + spins @ fields
    logmass -= logmass.max()
    mass = np.exp(logmass)
    return mass / mass.sum()


def detailed_balance_check(params, a, z, n_pairs, seed=0):
    """Max detailed-balance violation of the random-scan kernel.

    Samples (state, site) pairs, flips the site, and compares
    pi(x) k(x -> x') with pi(x') k(x' -> x) under the exact law.
    """
    z = _check_dims(params, a, z)
    n = a.n
    if n > BALANCE_MAX_SITES:
        raise TooLargeError(f"balance check limited to {BALANCE_MAX_SITES} sites")
    probs = exact_distribution(params, a, z)
    rng = np.random.default_rng(seed)
    states = rng.integers(0, 1 << n, size=n_pairs)
    sites = rng.integers(0, n, size=n_pairs)
    worst = 0.0
    for k_idx, i in zip(states, sites):
        x = index_to_spins(int(k_idx), n)
        p_plus = conditional_prob_plus(params, a, z, x, int(i))
        flipped = int(k_idx) ^ (1 << int(i))
        if x[i] == 1:
            # forward move sets site to -1
            fwd = (1.0 - p_plus) / n
            back = p_plus / n
        else:
            fwd = p_plus / n
            back = (1.0 - p_plus) / n
        worst = max(worst, abs(probs[int(k_idx)] * fwd - probs[flipped] * back))
    return worst


def save_spins(path, x):
    """Write configurations as CSV rows of +/-1 integers."""
    arr = np.atleast_2d(np.asarray(x, dtype=np.int64))
    with open(path, "w", encoding="utf-8") as fh:
        for row in arr:
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def load_spins(path):
    """Read configurations written by save_spins; returns an array (k, n)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([int(v) for v in line.split(",")])
    arr = np.asarray(rows, dtype=np.int8)
    for row in arr:
        as_spins(row)
    return arr
