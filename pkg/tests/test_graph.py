"""Tests for graph construction, Markov matrices and neighborhood queries."""

import logging

import numpy as np
import pytest
from scipy import sparse

from markov_interp.core.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    IsolatedNodeError,
    NodeIndexError,
)
from markov_interp.core.graph import (
    Graph,
    PointCloud,
    SensorTable,
    as_node_array,
    connected_components,
    geodesic_affinity,
    graph_shift,
    haversine_distances,
    hop_distances,
    knn_affinity,
    markov_matrix,
    one_hop_closure,
    symmetrize,
)


def dense(g: Graph) -> np.ndarray:
    return g.affinity.toarray()


class TestGraph:
    def test_from_edges_is_symmetric_with_degrees(self, star):
        W = dense(star)
        assert np.array_equal(W, W.T)
        assert star.degrees.tolist() == [4.0, 1.0, 1.0, 1.0, 1.0]
        assert star.n == 5
        assert star.edge_count == 4

    def test_rejects_asymmetric_affinity(self):
        with pytest.raises(InvalidParameterError):
            Graph(sparse.csr_matrix(np.array([[0.0, 2.0], [1.0, 0.0]])))

    def test_rejects_negative_weight(self):
        with pytest.raises(InvalidParameterError):
            Graph(sparse.csr_matrix(np.array([[0.0, -1.0], [-1.0, 0.0]])))

    def test_rejects_self_loop(self):
        with pytest.raises(InvalidParameterError):
            Graph(sparse.csr_matrix(np.eye(2)))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            Graph(sparse.csr_matrix(np.zeros((2, 3))))

    def test_edge_endpoint_out_of_range(self):
        with pytest.raises(NodeIndexError):
            Graph.from_edges(2, [0], [2], [1.0])


class TestKnnAffinity:
    def test_collinear_points_exp_negdist(self):
        cloud = PointCloud(np.array([[0.0], [1.0], [3.0]]))
        W = dense(knn_affinity(cloud, 1))
        assert W[0, 1] == pytest.approx(np.exp(-1.0))
        assert W[1, 0] == pytest.approx(np.exp(-1.0))
        # node 2 keeps node 1 at distance 2; max-symmetrization copies it back
        assert W[1, 2] == pytest.approx(np.exp(-2.0))
        assert W[2, 1] == pytest.approx(np.exp(-2.0))
        assert W[0, 2] == 0.0

    def test_identical_points_weight_one(self):
        g = knn_affinity(PointCloud(np.zeros((2, 2))), 1)
        assert dense(g)[0, 1] == 1.0
        assert g.edge_count == 1

    def test_normalized_dist_weights(self):
        cloud = PointCloud(np.array([[0.0], [1.0], [3.0]]))
        W = dense(knn_affinity(cloud, 1, kernel="normalized_dist"))
        # kept distances 1, 1, 2; sum 4; N^2 = 9
        assert W[0, 1] == pytest.approx(9.0 / 4.0)
        assert W[1, 2] == pytest.approx(18.0 / 4.0)

    def test_normalized_dist_decreasing(self):
        cloud = PointCloud(np.array([[0.0], [1.0], [3.0]]))
        W = dense(knn_affinity(cloud, 1, kernel="normalized_dist", decreasing=True))
        assert W[0, 1] == pytest.approx(np.exp(-2.25))
        assert W[1, 2] == pytest.approx(np.exp(-4.5))

    def test_every_node_keeps_l_neighbors(self):
        rng = np.random.default_rng(0)
        cloud = PointCloud(rng.uniform(size=(100, 2)))
        g = knn_affinity(cloud, 9)
        nnz_per_row = np.diff(g.affinity.indptr)
        assert nnz_per_row.min() >= 9
        W = dense(g)
        assert np.array_equal(W, W.T)

    @pytest.mark.parametrize("L", [0, 3, 4])
    def test_invalid_neighbor_count(self, L):
        with pytest.raises(InvalidParameterError):
            knn_affinity(PointCloud(np.arange(3.0)), L)

    def test_unknown_kernel(self):
        with pytest.raises(InvalidParameterError):
            knn_affinity(PointCloud(np.arange(3.0)), 1, kernel="gaussian")


class TestGeodesicAffinity:
    def test_haversine_one_degree_latitude(self):
        d = haversine_distances(np.array([0.0, 0.0]), np.array([0.0, 1.0]))
        assert d[0, 1] == pytest.approx(6371.0 * np.pi / 180.0)
        assert d[0, 0] == 0.0

    def test_two_sensors_single_neighbor_weight_one(self):
        table = SensorTable([0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [1.0, 2.0])
        W = dense(geodesic_affinity(table, 1))
        assert W[0, 1] == pytest.approx(1.0)
        assert W[1, 0] == pytest.approx(1.0)

    def test_equidistant_sensors_half_weights(self):
        # three points on the equator 120 degrees apart
        table = SensorTable([0.0, 120.0, -120.0], [0.0] * 3, [0.0] * 3, [0.0] * 3)
        W = dense(geodesic_affinity(table, 2, scale=1e-4))
        off = W[~np.eye(3, dtype=bool)]
        assert np.allclose(off, 0.5)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(1)
        lon = rng.uniform(-10, 10, 10)
        lat = rng.uniform(40, 50, 10)
        table = SensorTable(lon, lat, np.zeros(10), np.zeros(10))
        K, scale = 3, 0.01
        W = dense(geodesic_affinity(table, K, scale=scale))

        dist = haversine_distances(lon, lat) * scale
        masked = dist + np.diag(np.full(10, np.inf))
        nbrs = np.argsort(masked, axis=1, kind="stable")[:, :K]
        S = np.array([np.exp(-dist[n, nbrs[n]] ** 2).sum() for n in range(10)])
        A = np.zeros((10, 10))
        for n in range(10):
            for m in nbrs[n]:
                A[n, m] = np.exp(-dist[n, m] ** 2) / np.sqrt(S[n] * S[m])
        assert np.allclose(W, np.maximum(A, A.T), atol=1e-12)

    def test_k_too_large(self):
        table = SensorTable([0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
        with pytest.raises(InvalidParameterError):
            geodesic_affinity(table, 2)

    def test_latitude_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            SensorTable([0.0], [95.0], [0.0], [0.0])


class TestSymmetrize:
    def test_entrywise_max(self):
        g = symmetrize(np.array([[0.0, 2.0], [1.0, 0.0]]))
        assert dense(g).tolist() == [[0.0, 2.0], [2.0, 0.0]]

    def test_idempotent_on_symmetric_input(self, star):
        assert np.array_equal(dense(symmetrize(star.affinity)), dense(star))

    def test_random_sparse_matches_dense_reference(self):
        M = sparse.random(20, 20, density=0.2, random_state=3).toarray()
        np.fill_diagonal(M, 0.0)
        assert np.array_equal(dense(symmetrize(M)), np.maximum(M, M.T))

    def test_self_loops_dropped_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING):
            g = symmetrize(np.array([[1.0, 1.0], [0.0, 0.0]]))
        assert dense(g).tolist() == [[0.0, 1.0], [1.0, 0.0]]
        assert "self-loops" in caplog.text


class TestMarkovMatrix:
    def test_star_rows(self, star):
        P = markov_matrix(star).entries.toarray()
        assert P[0].tolist() == [0.0, 0.25, 0.25, 0.25, 0.25]
        for leaf in range(1, 5):
            assert P[leaf].tolist() == [1.0, 0.0, 0.0, 0.0, 0.0]

    def test_complete_graph_half(self, k3):
        P = markov_matrix(k3).entries.toarray()
        assert np.allclose(P[~np.eye(3, dtype=bool)], 0.5)

    def test_rows_sum_to_one(self, rgg):
        P = markov_matrix(rgg)
        assert np.allclose(P @ np.ones(rgg.n), 1.0)

    def test_isolated_node_named(self):
        g = Graph.from_edges(3, [0], [1], [1.0])
        with pytest.raises(IsolatedNodeError) as info:
            markov_matrix(g)
        assert info.value.node == 2


class TestGraphShift:
    def test_stochastic_fixed_point(self, k3):
        assert np.allclose(graph_shift(markov_matrix(k3), np.ones(3)), 1.0)

    def test_star_zero_shift(self, star):
        s2 = np.array([0.0, -2.0, -2.0, 2.0, 2.0])
        assert np.allclose(graph_shift(markov_matrix(star), s2), 0.0)

    def test_identity(self):
        s = np.array([1.0, -3.0, 2.5])
        assert np.array_equal(graph_shift(sparse.identity(3, format="csr"), s), s)

    def test_length_mismatch(self, star):
        with pytest.raises(DimensionMismatchError):
            graph_shift(markov_matrix(star), np.ones(4))


class TestNeighborhoods:
    def test_closure_of_center_is_everything(self, star):
        assert one_hop_closure(star, [0]).tolist() == [0, 1, 2, 3, 4]

    def test_closure_of_leaf(self, star):
        assert one_hop_closure(star, [1]).tolist() == [0, 1]

    def test_closure_fixed_point(self, star):
        assert one_hop_closure(star, range(5)).tolist() == [0, 1, 2, 3, 4]

    def test_hop_distances_on_path(self, path4):
        assert hop_distances(path4, [0]).tolist() == [0.0, 1.0, 2.0, 3.0]
        assert hop_distances(path4, [0, 3]).tolist() == [0.0, 1.0, 1.0, 0.0]

    def test_hop_distances_unreachable(self):
        g = Graph.from_edges(4, [0, 2], [1, 3], [1.0, 1.0])
        dist = hop_distances(g, [0])
        assert dist[1] == 1.0
        assert np.isinf(dist[2]) and np.isinf(dist[3])

    def test_connected_components(self):
        g = Graph.from_edges(4, [0, 2], [1, 3], [1.0, 1.0])
        count, labels = connected_components(g)
        assert count == 2
        assert labels[0] == labels[1] != labels[2] == labels[3]

    def test_node_index_validation(self):
        with pytest.raises(NodeIndexError):
            as_node_array([0, 5], 5)
        with pytest.raises(NodeIndexError):
            as_node_array([0.5], 5)
        assert as_node_array([1.0, 2.0], 5).tolist() == [1, 2]
