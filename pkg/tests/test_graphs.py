import json

import numpy as np
import pytest

from netlogit import (
    SBM,
    EmptyGraphError,
    ErdosRenyi,
    FixedEdgeList,
    Graph,
    Inhomogeneous,
    InteractionMatrix,
    ZeroMatrixError,
    diagnostics,
    generate_graph,
    normalize_inf,
    read_edge_list,
    scale_adjacency,
    write_edge_list,
)


def test_graph_rejects_self_loops_and_duplicates():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 5)])


def test_graph_canonicalizes_edges():
    g = Graph(4, [(2, 1), (3, 0)])
    assert g.edges.tolist() == [[0, 3], [1, 2]]
    assert g.degrees().tolist() == [1, 1, 1, 1]


def test_er_zero_probability_gives_empty_graph():
    g = generate_graph(ErdosRenyi(n=5, p=0.0), seed=3)
    assert g.n_edges == 0


def test_er_edge_count_matches_binomial_mean():
    # mean C(1200,2) * 5/1200 = 2997.5, sd ~= 54.7; average 100 seeds
    n, p = 1200, 5 / 1200
    counts = [generate_graph(ErdosRenyi(n, p), seed=s).n_edges for s in range(100)]
    mean = 1200 * 1199 / 2 * p
    sd = np.sqrt(1200 * 1199 / 2 * p * (1 - p))
    assert abs(np.mean(counts) - mean) < 3 * sd / np.sqrt(100)


def test_er_determinism():
    g1 = generate_graph(ErdosRenyi(200, 0.02), seed=11)
    g2 = generate_graph(ErdosRenyi(200, 0.02), seed=11)
    g3 = generate_graph(ErdosRenyi(200, 0.02), seed=12)
    assert np.array_equal(g1.edges, g2.edges)
    assert not np.array_equal(g1.edges, g3.edges)


def test_sbm_block_edge_probabilities():
    # two equal blocks, within prob 4/n, between prob 8/n
    n = 1200
    spec = SBM(n=n, block_proportions=(0.5, 0.5), base_matrix=((4.0, 8.0), (8.0, 4.0)))
    within = between = 0
    seeds = 40
    for s in range(seeds):
        g = generate_graph(spec, seed=s)
        same = (g.edges[:, 0] < 600) == (g.edges[:, 1] < 600)
        within += int(same.sum())
        between += int((~same).sum())
    pairs_within = 2 * (600 * 599 / 2)
    pairs_between = 600 * 600
    exp_within = pairs_within * 4 / n * seeds
    exp_between = pairs_between * 8 / n * seeds
    assert abs(within - exp_within) < 4 * np.sqrt(exp_within)
    assert abs(between - exp_between) < 4 * np.sqrt(exp_between)


def test_sbm_rejects_bad_proportions_and_entries():
    with pytest.raises(ValueError):
        generate_graph(SBM(10, (0.5, 0.4), ((1.0, 1.0), (1.0, 1.0))), seed=0)
    with pytest.raises(ValueError):
        generate_graph(SBM(10, (0.5, 0.5), ((11.0, 1.0), (1.0, 1.0))), seed=0)
    # first block floors to zero vertices despite positive proportion
    with pytest.raises(ValueError):
        generate_graph(
            SBM(3, (0.1, 0.8, 0.1), ((1.0,) * 3,) * 3), seed=0
        )


def test_inhomogeneous_respects_matrix():
    n = 6
    pm = np.zeros((n, n))
    pm[0, 1] = pm[1, 0] = 1.0
    g = generate_graph(Inhomogeneous(n=n, prob_matrix=pm), seed=0)
    assert g.edges.tolist() == [[0, 1]]


def test_scale_adjacency_triangle(triangle_matrix):
    dense = triangle_matrix.toarray()
    off = dense[~np.eye(3, dtype=bool)]
    assert np.allclose(off, 0.5)
    assert np.allclose(np.diag(dense), 0.0)


def test_scale_adjacency_single_edge():
    a = scale_adjacency(Graph(2, [(0, 1)]))
    assert np.allclose(a.toarray(), [[0, 1], [1, 0]])


def test_scale_adjacency_total_sum_identity():
    rng = np.random.default_rng(0)
    specs = []
    for s in range(40):
        specs.append(ErdosRenyi(n=int(rng.integers(20, 200)), p=float(rng.uniform(0.02, 0.3))))
    for s in range(30):
        specs.append(
            SBM(
                n=int(rng.integers(40, 200)),
                block_proportions=(0.5, 0.5),
                base_matrix=((6.0, 3.0), (3.0, 6.0)),
            )
        )
    for s in range(30):
        n = int(rng.integers(10, 40))
        pm = rng.uniform(0, 0.5, size=(n, n))
        pm = (pm + pm.T) / 2
        np.fill_diagonal(pm, 0.0)
        specs.append(Inhomogeneous(n=n, prob_matrix=pm))
    checked = 0
    for i, spec in enumerate(specs):
        g = generate_graph(spec, seed=1000 + i)
        if g.n_edges == 0:
            continue
        a = scale_adjacency(g)
        n = g.n_vertices
        assert abs(a.total_sum() - n) <= 1e-9 * n
        checked += 1
    assert checked >= 100


def test_scale_adjacency_inf_norm_is_scaled_max_degree():
    for seed in range(5):
        g = generate_graph(ErdosRenyi(80, 0.1), seed=seed)
        a = scale_adjacency(g)
        expected = g.n_vertices / (2 * g.n_edges) * g.degrees().max()
        assert a.inf_norm() == pytest.approx(expected, rel=1e-12)


def test_scale_adjacency_empty_graph_errors():
    with pytest.raises(EmptyGraphError):
        scale_adjacency(Graph(4, []))


def test_normalize_inf_triangle(triangle_matrix):
    normed, scale = normalize_inf(triangle_matrix)
    assert scale == pytest.approx(1.0)
    assert np.allclose(normed.toarray(), triangle_matrix.toarray())


def test_normalize_inf_star_graph():
    # star K_{1,4}: center row sum 5/(2*4) * 4 = 2.5
    g = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    a = scale_adjacency(g)
    normed, scale = normalize_inf(a)
    assert scale == pytest.approx(2.5)
    assert normed.inf_norm() == pytest.approx(1.0)


def test_normalize_inf_rejects_zero_matrix():
    import scipy.sparse as sp

    with pytest.raises(ZeroMatrixError):
        normalize_inf(InteractionMatrix(sp.csr_matrix((3, 3))))


def test_diagnostics_triangle(triangle, triangle_matrix):
    diag = diagnostics(triangle_matrix, triangle)
    assert diag.a_inf_norm == pytest.approx(1.0)
    assert diag.a_frob_sq_over_n == pytest.approx(0.5)
    assert diag.d_max == 2
    assert diag.avg_degree == pytest.approx(2.0)
    assert diag.nonisolated_fraction == pytest.approx(1.0)
    assert diag.z_gram_min_eig is None
    doc = json.loads(diag.to_json())
    assert doc["d_max"] == 2
    assert doc["rademacher_estimate"] is None


def test_diagnostics_frobenius_against_dense():
    for seed in range(8):
        g = generate_graph(ErdosRenyi(40, 0.15), seed=seed)
        if g.n_edges == 0:
            continue
        a = scale_adjacency(g)
        diag = diagnostics(a, g)
        dense = a.toarray()
        assert diag.a_frob_sq_over_n == pytest.approx((dense**2).sum() / 40, rel=1e-12)
        assert diag.a_frob_sq_over_n == pytest.approx(
            (g.n_vertices / (2 * g.n_edges)) ** 2 * 2 * g.n_edges / g.n_vertices
        )


def test_diagnostics_orthonormal_covariates(triangle, triangle_matrix):
    # columns of sqrt(n) * orthonormal basis give unit gram eigenvalues
    z = np.sqrt(3) * np.eye(3)[:, :2]
    diag = diagnostics(triangle_matrix, triangle, z=z)
    assert diag.z_gram_min_eig == pytest.approx(1.0)


def test_rademacher_estimate_against_monte_carlo_oracle():
    # oracle: independent direct Monte-Carlo of E max_j |mean_i eps_i z_ij|
    rng = np.random.default_rng(42)
    n, d = 2000, 100
    z = rng.standard_normal((n, d))
    reps = 10_000
    oracle_rng = np.random.default_rng(999)
    vals = np.empty(reps)
    for r in range(reps):
        eps = oracle_rng.choice((-1.0, 1.0), size=n)
        vals[r] = np.abs(eps @ z / n).max()
    oracle = vals.mean()

    g = generate_graph(ErdosRenyi(n, 3 / n), seed=5)
    a = scale_adjacency(g)
    diag = diagnostics(a, g, z=z, mc_reps=400, seed=7)
    assert abs(diag.rademacher_estimate - oracle) / oracle < 0.05


def test_diagnostics_dimension_mismatch(triangle_matrix):
    from netlogit import DimensionMismatchError

    g5 = Graph(5, [(0, 1)])
    with pytest.raises(DimensionMismatchError):
        diagnostics(triangle_matrix, g5)


def test_edge_list_roundtrip(tmp_path):
    g = generate_graph(ErdosRenyi(30, 0.1), seed=4)
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    h = read_edge_list(path)
    assert h.n_vertices == g.n_vertices
    assert np.array_equal(h.edges, g.edges)
    via_spec = generate_graph(FixedEdgeList(path=str(path)))
    assert np.array_equal(via_spec.edges, g.edges)


def test_edge_list_preserves_isolated_vertices(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# comment\nn 6\n0 1\n")
    g = read_edge_list(path)
    assert g.n_vertices == 6
    assert g.n_edges == 1
    assert g.degrees().tolist() == [1, 1, 0, 0, 0, 0]


def test_edge_list_requires_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n")
    with pytest.raises(ValueError):
        read_edge_list(path)


def test_interaction_matrix_validation():
    import scipy.sparse as sp

    with pytest.raises(ValueError):
        InteractionMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))  # nonzero diagonal
    with pytest.raises(ValueError):
        InteractionMatrix(np.array([[0.0, 1.0], [0.5, 0.0]]))  # asymmetric
    with pytest.raises(ValueError):
        InteractionMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))  # negative
    m = InteractionMatrix(sp.csr_matrix(np.array([[0.0, 2.0], [2.0, 0.0]])))
    assert m.inf_norm() == 2.0
    assert m.frob_sq() == 8.0
