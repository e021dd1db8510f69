"""Penalized pseudo-likelihood estimation for logistic regression on networks.

Binary outcomes on the nodes of a known network are modeled with a pairwise
interaction term of strength beta plus per-node covariate effects theta.
The package generates synthetic instances (random graphs, Gaussian
covariates, Gibbs-sampled outcomes), fits the l1-penalized pseudo-likelihood
by proximal gradient descent with backtracking, selects the penalty by BIC,
and reproduces the reference numerical experiments.
"""

__version__ = "0.1.0"

from .covgen import (
    CovariateSpec,
    Explicit,
    FromFile,
    GaussianAR,
    GaussianIdentity,
    ThetaSpec,
    UniformShell,
    gen_covariates,
    gen_theta,
)
from .errors import (
    DimensionMismatchError,
    EmptyGraphError,
    InsufficientDataError,
    NetlogitError,
    NoConvergedFitError,
    NonFiniteError,
    TooLargeError,
    ZeroMatrixError,
)
from .experiments import (
    ErdosRenyiFamily,
    ErrorTable,
    ExperimentConfig,
    SBMFamily,
    derive_seed,
    desk_error_config,
    paper_error_config,
    paper_path_config,
    rate_slope,
    run_error_experiment,
    run_solution_path_experiment,
)
from .graphs import (
    SBM,
    AssumptionDiagnostics,
    ErdosRenyi,
    FixedEdgeList,
    Graph,
    Inhomogeneous,
    InteractionMatrix,
    diagnostics,
    generate_graph,
    normalize_inf,
    read_edge_list,
    scale_adjacency,
    write_edge_list,
)
from .model import (
    ModelParams,
    conditional_prob_minus,
    conditional_prob_plus,
    detailed_balance_check,
    exact_distribution,
    gibbs_chain,
    gibbs_sample,
    local_field,
)
from .optim import FitResult, SolverConfig, fit, line_search_ok, prox_step, soft_threshold
from .pseudo import GradHess, PseudoLikelihoodProblem
from .tune import (
    LambdaGrid,
    PathResult,
    beta_only_minimizer,
    bic,
    full_shrinkage_lambda,
    select,
    solution_path,
    write_path_csv,
)
