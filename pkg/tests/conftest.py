import numpy as np
import pytest

from netlogit import (
    CovariateSpec,
    ErdosRenyi,
    GaussianAR,
    Graph,
    ModelParams,
    PseudoLikelihoodProblem,
    ThetaSpec,
    gen_covariates,
    gen_theta,
    generate_graph,
    gibbs_sample,
    scale_adjacency,
)


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def triangle_matrix(triangle):
    return scale_adjacency(triangle)


def make_problem(n=50, d=10, p=0.1, beta=0.3, s=None, seed=0, gibbs_iters=2000):
    """Random connected-ish instance with outcomes drawn from the model."""
    rng_seed = seed
    for attempt in range(20):
        g = generate_graph(ErdosRenyi(n=n, p=p), seed=rng_seed + attempt)
        if g.n_edges > 0:
            break
    a = scale_adjacency(g)
    z = gen_covariates(CovariateSpec(d=d, kind=GaussianAR(0.2)), n, seed=seed + 1)
    theta = gen_theta(ThetaSpec(d=d, s=d if s is None else s), seed=seed + 2)
    x = gibbs_sample(ModelParams(beta, theta), a, z, gibbs_iters, seed=seed + 3)
    return PseudoLikelihoodProblem(a, z, x), theta


def random_gamma(d, rng, scale=1.0):
    return rng.uniform(-scale, scale, size=d + 1)
