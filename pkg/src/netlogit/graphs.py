"""Random-graph ensembles, the scaled interaction matrix, and assumption diagnostics.

Graphs are simple and undirected, stored as sorted edge lists. The interaction
matrix derived from a graph is the adjacency matrix rescaled so that its total
entry sum equals the number of vertices, kept in CSR form with both (i, j) and
(j, i) stored explicitly for fast row access.
"""

import json
from dataclasses import dataclass, asdict

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionMismatchError,
    EmptyGraphError,
    ZeroMatrixError,
)

__all__ = [
    "Graph",
    "InteractionMatrix",
    "ErdosRenyi",
    "SBM",
    "Inhomogeneous",
    "FixedEdgeList",
    "AssumptionDiagnostics",
    "generate_graph",
    "scale_adjacency",
    "normalize_inf",
    "diagnostics",
    "read_edge_list",
    "write_edge_list",
]


class Graph:
    """Simple undirected graph on vertices 0..n_vertices-1.

    Edges are canonicalized to (u, v) with u < v, sorted lexicographically.
    Self-loops and duplicate edges are rejected.
    """

    def __init__(self, n_vertices, edges):
        n = int(n_vertices)
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if (arr[:, 0] == arr[:, 1]).any():
                raise ValueError("self-loops are not allowed")
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError("vertex index out of range")
            lo = arr.min(axis=1)
            hi = arr.max(axis=1)
            arr = np.unique(np.column_stack([lo, hi]), axis=0)
            if arr.shape[0] != len(lo):
                raise ValueError("duplicate edges are not allowed")
        self.n_vertices = n
        self.edges = arr
        self.edges.setflags(write=False)

    @property
    def n_edges(self):
        return self.edges.shape[0]

    def degrees(self):
        """Degree of every vertex, length n_vertices."""
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    def __repr__(self):
        return f"Graph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


class InteractionMatrix:
    """Sparse symmetric nonnegative matrix with zero diagonal.

    Wraps a CSR matrix; treat instances as immutable after construction.
    """

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix, dtype=np.float64)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError("interaction matrix must be square")
        if m.diagonal().any():
            raise ValueError("interaction matrix must have zero diagonal")
        if m.nnz and m.data.min() < 0:
            raise ValueError("interaction matrix entries must be nonnegative")
        asym = abs(m - m.T)
        if asym.nnz and asym.max() > 1e-12 * max(1.0, m.data.max() if m.nnz else 0.0):
            raise ValueError("interaction matrix must be symmetric")
        m.sort_indices()
        self._m = m

    @property
    def n(self):
        return self._m.shape[0]

    @property
    def matrix(self):
        """Underlying scipy CSR matrix."""
        return self._m

    def row(self, i):
        """Column indices and values of row i."""
        lo, hi = self._m.indptr[i], self._m.indptr[i + 1]
        return self._m.indices[lo:hi], self._m.data[lo:hi]

    def dot(self, x):
        return self._m @ np.asarray(x, dtype=np.float64)

    def inf_norm(self):
        """Maximum row sum of absolute entries."""
        if self._m.nnz == 0:
            return 0.0
        return float(np.abs(self._m).sum(axis=1).max())

    def frob_sq(self):
        return float((self._m.data**2).sum())

    def total_sum(self):
        return float(self._m.data.sum())

    def toarray(self):
        return self._m.toarray()

    def __repr__(self):
        return f"InteractionMatrix(n={self.n}, nnz={self._m.nnz})"


@dataclass
class ErdosRenyi:
    """Every pair linked independently with probability p."""

    n: int
    p: float


@dataclass
class SBM:
    """Stochastic block model: contiguous index blocks sized by the
    proportion vector, edge probability base_matrix[i][j] / n between
    blocks i and j."""

    n: int
    block_proportions: tuple
    base_matrix: tuple


@dataclass
class Inhomogeneous:
    """Explicit symmetric probability matrix, one entry per pair."""

    n: int
    prob_matrix: object


@dataclass
class FixedEdgeList:
    """Graph read verbatim from an edge-list file."""

    path: str


def _sample_edges_rowwise(n, row_probs, rng):
    """Bernoulli-sample the upper triangle row by row.

    row_probs(u) must return the probabilities for pairs (u, v),
    v = u+1 .. n-1. Row order is fixed, so output is deterministic
    for a given generator state.
    """
    us = []
    vs = []
    for u in range(n - 1):
        p = row_probs(u)
        hits = np.nonzero(rng.random(n - u - 1) < p)[0]
        if hits.size:
            us.append(np.full(hits.size, u, dtype=np.int64))
            vs.append(u + 1 + hits.astype(np.int64))
    if not us:
        return np.empty((0, 2), dtype=np.int64)
    return np.column_stack([np.concatenate(us), np.concatenate(vs)])


def sbm_block_sizes(n, proportions):
    """Contiguous block boundaries; the last block absorbs rounding."""
    props = np.asarray(proportions, dtype=np.float64)
    if props.ndim != 1 or props.size < 1:
        raise ValueError("block proportions must be a nonempty vector")
    if (props < 0).any():
        raise ValueError("block proportions must be nonnegative")
    csum = np.cumsum(props)
    if abs(csum[-1] - 1.0) > 1e-12:
        raise ValueError("block proportions must sum to 1")
    cuts = np.floor(n * csum + 1e-9).astype(np.int64)
    cuts[-1] = n
    sizes = np.diff(np.concatenate([[0], cuts]))
    for j, (sz, pr) in enumerate(zip(sizes, props)):
        if sz == 0 and pr > 0:
            raise ValueError(f"block {j} is empty despite positive proportion")
    return sizes


def generate_graph(spec, seed=0):
    """Draw one graph from an ensemble spec, deterministic given seed."""
    if isinstance(spec, FixedEdgeList):
        return read_edge_list(spec.path)

    rng = np.random.default_rng(seed)

    if isinstance(spec, ErdosRenyi):
        n, p = int(spec.n), float(spec.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError("edge probability must be in [0, 1]")
        edges = _sample_edges_rowwise(n, lambda u: p, rng)
        return Graph(n, edges)

    if isinstance(spec, SBM):
        n = int(spec.n)
        base = np.asarray(spec.base_matrix, dtype=np.float64)
        if base.ndim != 2 or base.shape[0] != base.shape[1]:
            raise ValueError("SBM base matrix must be square")
        if not np.allclose(base, base.T):
            raise ValueError("SBM base matrix must be symmetric")
        if (base < 0).any():
            raise ValueError("SBM base matrix entries must be nonnegative")
        if (base > n).any():
            raise ValueError("SBM base matrix entry exceeds n; probability above 1")
        sizes = sbm_block_sizes(n, spec.block_proportions)
        block_of = np.repeat(np.arange(len(sizes)), sizes)
        pmat = np.minimum(base / n, 1.0)
        edges = _sample_edges_rowwise(
            n, lambda u: pmat[block_of[u], block_of[u + 1 :]], rng
        )
        return Graph(n, edges)

    if isinstance(spec, Inhomogeneous):
        n = int(spec.n)
        pm = np.asarray(spec.prob_matrix, dtype=np.float64)
        if pm.shape != (n, n):
            raise DimensionMismatchError("probability matrix shape must be (n, n)")
        if not np.allclose(pm, pm.T):
            raise ValueError("probability matrix must be symmetric")
        if (pm < 0).any() or (pm > 1).any():
            raise ValueError("probabilities must be in [0, 1]")
        edges = _sample_edges_rowwise(n, lambda u: pm[u, u + 1 :], rng)
        return Graph(n, edges)

    raise TypeError(f"unknown ensemble spec: {type(spec).__name__}")


def scale_adjacency(g):
    """Interaction matrix n/(2|E|) times the 0/1 adjacency matrix.

    The rescaling makes the total entry sum equal n exactly.
    """
    m = g.n_edges
    if m == 0:
        raise EmptyGraphError("cannot scale the adjacency of an edgeless graph")
    w = g.n_vertices / (2.0 * m)
    rows = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
    cols = np.concatenate([g.edges[:, 1], g.edges[:, 0]])
    coo = sp.coo_matrix(
        (np.full(2 * m, w), (rows, cols)), shape=(g.n_vertices, g.n_vertices)
    )
    return InteractionMatrix(coo.tocsr())


def normalize_inf(a):
    """Divide by the max row sum so the result has unit inf-norm.

    Returns (normalized matrix, original inf-norm) so callers can rescale
    parameters consistently.
    """
    scale = a.inf_norm()
    if scale == 0.0:
        raise ZeroMatrixError("cannot normalize an all-zero matrix")
    return InteractionMatrix(a.matrix * (1.0 / scale)), scale


@dataclass
class AssumptionDiagnostics:
    """Summary statistics checked against the model's regularity conditions."""

    a_inf_norm: float
    a_frob_sq_over_n: float
    d_max: int
    avg_degree: float
    nonisolated_fraction: float
    z_gram_min_eig: float | None = None
    rademacher_estimate: float | None = None

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def diagnostics(a, g, z=None, mc_reps=200, seed=0):
    """Compute assumption diagnostics for an interaction matrix and its graph.

    With a covariate matrix z, also reports the minimum eigenvalue of the
    covariate Gram matrix z'z/n and a Monte-Carlo estimate of the expected
    sup-norm of the sign-randomized covariate average (mc_reps replicates
    of fresh i.i.d. sign flips).
    """
    if a.n != g.n_vertices:
        raise DimensionMismatchError("matrix and graph sizes differ")
    deg = g.degrees()
    n = g.n_vertices
    z_eig = None
    rad = None
    if z is not None:
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2 or z.shape[0] != n:
            raise DimensionMismatchError("covariate matrix must have n rows")
        gram = z.T @ z / n
        z_eig = float(np.linalg.eigvalsh(gram).min())
        rng = np.random.default_rng(seed)
        signs = rng.integers(0, 2, size=(mc_reps, n)) * 2 - 1
        rad = float(np.abs(signs @ z / n).max(axis=1).mean())
    return AssumptionDiagnostics(
        a_inf_norm=a.inf_norm(),
        a_frob_sq_over_n=a.frob_sq() / n,
        d_max=int(deg.max()) if n else 0,
        avg_degree=2.0 * g.n_edges / n,
        nonisolated_fraction=float((deg > 0).mean()),
        z_gram_min_eig=z_eig,
        rademacher_estimate=rad,
    )


def read_edge_list(path):
    """Read the edge-list format: '#' comments, then 'n <N>', then 'u v' lines."""
    n = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if parts[0] != "n" or len(parts) != 2:
                    raise ValueError(
                        f"{path}:{lineno}: first non-comment line must be 'n <N>'"
                    )
                n = int(parts[1])
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v'")
            edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise ValueError(f"{path}: missing 'n <N>' header")
    return Graph(n, edges)


def write_edge_list(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {g.n_vertices}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")
