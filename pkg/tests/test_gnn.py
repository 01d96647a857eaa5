import numpy as np
import pytest
from hypothesis import given, settings

from raftgp.features import gaussian_projection, normalized_adjacency
from raftgp.gnn import LayerConfig, default_layer_dims, forward, init_weights, propagation_matrix

from .conftest import erdos_renyi, graph_from_pairs, small_graphs, two_cliques
from .oracles import dense_adjacency, dense_gcn


def test_isolated_node():
    p = propagation_matrix(graph_from_pairs(1, []))
    assert p.toarray().tolist() == [[1.0]]


def test_single_edge():
    p = propagation_matrix(graph_from_pairs(2, [(0, 1)]))
    np.testing.assert_allclose(p.toarray(), 0.5, rtol=1e-15)
    assert p.nnz == 4


def test_row_sums_on_regular_graph(triangle):
    np.testing.assert_allclose(propagation_matrix(triangle).sum(axis=1).A1, 1.0, rtol=1e-15)


def test_row_sums_can_exceed_one():
    star = graph_from_pairs(4, [(0, 1), (0, 2), (0, 3)])
    sums = propagation_matrix(star).sum(axis=1).A1
    assert sums[0] == pytest.approx(0.25 + 3 / np.sqrt(8))
    assert sums[0] > 1 > sums[1]


@settings(max_examples=40, deadline=None)
@given(small_graphs())
def test_propagation_structure(g):
    p = propagation_matrix(g)
    assert p.nnz == g.num_nodes + 2 * g.num_edges
    d_hat = g.degrees + 1.0
    # sqrt(d_hat) is the Perron vector with eigenvalue 1
    np.testing.assert_allclose(p @ np.sqrt(d_hat), np.sqrt(d_hat), rtol=1e-12)
    if g.num_nodes:
        eig = np.linalg.eigvalsh(p.toarray())
        assert eig.max() == pytest.approx(1.0, abs=1e-12)
        assert eig.min() >= -1 - 1e-12


def test_default_dims_follow_brackets():
    assert default_layer_dims(1000) == (256, 128, 64)
    assert default_layer_dims(1200) == (256, 128, 64)
    assert default_layer_dims(5000) == (1024, 512, 256, 128)
    assert default_layer_dims(10_000) == (4096, 2048, 1024, 512, 256)
    assert default_layer_dims(30) == (256, 128, 64)


def test_layer_config_validation():
    with pytest.raises(ValueError):
        LayerConfig((8,))
    with pytest.raises(ValueError):
        LayerConfig((8, 0))


def test_weight_shapes_and_scale():
    cfg = LayerConfig((400, 300, 100), seed=3)
    w = init_weights(cfg)
    assert [m.shape for m in w] == [(400, 300), (300, 100)]
    assert np.std(w[0]) == pytest.approx(300 ** -0.5, rel=0.02)
    assert np.std(w[1]) == pytest.approx(100 ** -0.5, rel=0.02)


def test_dimension_mismatch():
    g = graph_from_pairs(3, [(0, 1)])
    with pytest.raises(ValueError):
        forward(g, np.ones((3, 5)), LayerConfig((4, 2)))
    with pytest.raises(ValueError):
        forward(g, np.ones((2, 4)), LayerConfig((4, 2)))


def test_matches_dense_oracle():
    rng = np.random.default_rng(0)
    g = erdos_renyi(25, 0.2, rng)
    y = rng.standard_normal((25, 8))
    cfg = LayerConfig((8, 6, 3), seed=4)
    z = forward(g, y, cfg)
    np.testing.assert_allclose(z, dense_gcn(dense_adjacency(g), y, init_weights(cfg)), rtol=1e-10, atol=1e-12)


def test_unit_rows_and_zero_rows():
    g = graph_from_pairs(5, [(0, 1), (1, 2)])
    y = np.zeros((5, 4))
    y[:3] = np.random.default_rng(1).standard_normal((3, 4))
    z = forward(g, y, LayerConfig((4, 3, 2), seed=0))
    norms = np.linalg.norm(z, axis=1)
    np.testing.assert_allclose(norms[:3], 1.0, atol=1e-9)
    assert not z[3:].any()
    assert np.isfinite(z).all()


def test_deterministic():
    rng = np.random.default_rng(2)
    g = erdos_renyi(40, 0.1, rng)
    y = rng.standard_normal((40, 16))
    cfg = LayerConfig((16, 8, 4), seed=7)
    assert forward(g, y, cfg).tobytes() == forward(g, y, cfg).tobytes()


def test_automorphic_nodes_get_identical_rows():
    # nodes 1 and 2 are both attached only to 0 and 3
    g = graph_from_pairs(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
    y = np.random.default_rng(5).standard_normal((5, 6))
    y[2] = y[1]
    z = forward(g, y, LayerConfig((6, 4, 3), seed=1))
    np.testing.assert_array_equal(z[1], z[2])


def test_permutation_equivariance():
    rng = np.random.default_rng(3)
    g = erdos_renyi(30, 0.15, rng)
    y = rng.standard_normal((30, 10))
    cfg = LayerConfig((10, 7, 5), seed=2)
    perm = rng.permutation(30)
    z = forward(g, y, cfg)
    y_perm = np.empty_like(y)
    y_perm[perm] = y
    z_perm = forward(g.permute(perm), y_perm, cfg)
    np.testing.assert_allclose(z_perm[perm], z, rtol=1e-12, atol=1e-13)


def test_sparse_input_matches_dense_input():
    rng = np.random.default_rng(4)
    g = erdos_renyi(20, 0.2, rng)
    x = normalized_adjacency(g)
    cfg = LayerConfig((20, 6, 3), seed=0)
    np.testing.assert_allclose(forward(g, x, cfg), forward(g, x.toarray(), cfg), rtol=1e-12, atol=1e-14)


def mean_cosines(z, size):
    s = z @ z.T
    intra = [s[:size, :size], s[size:, size:]]
    intra_mean = np.mean([blk[~np.eye(size, dtype=bool)].mean() for blk in intra])
    return intra_mean, s[:size, size:].mean()


def test_two_cliques_embed_apart():
    g = two_cliques(8)
    wins = 0
    for seed in range(10):
        y = gaussian_projection(normalized_adjacency(g), 16, seed)
        z = forward(g, y, LayerConfig((16, 8, 4), seed=seed))
        intra, inter = mean_cosines(z, 8)
        wins += intra > inter
    assert wins == 10
