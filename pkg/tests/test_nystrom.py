"""Tests for the Nyström approximation and Nyström interpolation."""

import numpy as np
import pytest
from scipy import linalg, sparse

from markov_interp.core.errors import (
    InvalidParameterError,
    NodeIndexError,
    SingularEigenvalueError,
    SolverInfeasibleError,
)
from markov_interp.core.experiments import random_geometric_graph
from markov_interp.core.graph import markov_matrix
from markov_interp.core.interpolation import SampleSet, reconstruct
from markov_interp.core.nystrom import (
    KernelBlocks,
    interpolate_nystrom,
    nystrom_extend,
    nystrom_markov_eigs,
    partition_kernel,
)
from markov_interp.core.spectral import (
    markov_eigs,
    normalized_laplacian,
    orient_columns,
)


def _blocks(E, B):
    E = np.asarray(E, dtype=float)
    B = sparse.csr_matrix(np.asarray(B, dtype=float).reshape(-1, E.shape[0]))
    perm = np.arange(E.shape[0] + B.shape[0])
    return KernelBlocks(E=E, B=B, permutation=perm)


class TestPartitionKernel:
    def test_k2(self, k2):
        blocks = partition_kernel(k2, [0])
        np.testing.assert_allclose(blocks.E, [[1.0]])
        np.testing.assert_allclose(blocks.B.toarray(), [[-1.0]])
        np.testing.assert_array_equal(blocks.permutation, [0, 1])

    def test_landmarks_come_first(self, rgg):
        blocks = partition_kernel(rgg, [7, 3, 40])
        assert blocks.r == 3
        assert blocks.n == rgg.n
        np.testing.assert_array_equal(blocks.permutation[:3], [7, 3, 40])
        rest = blocks.permutation[3:]
        assert np.all(np.diff(rest) > 0)
        lap = normalized_laplacian(rgg).toarray()
        np.testing.assert_allclose(blocks.E, lap[np.ix_([7, 3, 40], [7, 3, 40])])
        np.testing.assert_allclose(blocks.B.toarray(), lap[np.ix_(rest, [7, 3, 40])])

    @pytest.mark.parametrize("M", [[], [1, 1]])
    def test_invalid_landmarks(self, rgg, M):
        with pytest.raises(InvalidParameterError):
            partition_kernel(rgg, M)

    def test_out_of_range(self, k3):
        with pytest.raises(NodeIndexError):
            partition_kernel(k3, [5])


class TestNystromExtend:
    @pytest.mark.parametrize("mode", ["standard", "revised"])
    def test_hand_blocks(self, mode):
        z_tilde, q = nystrom_extend(_blocks(np.diag([1.0, 2.0]), [[1.0, 0.0]]), mode)
        np.testing.assert_allclose(q, [1.0, 2.0])
        np.testing.assert_allclose(z_tilde, [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])

    def test_modes_differ_by_q(self):
        blocks = _blocks(np.diag([0.5, 2.0]), [[1.0, 1.0]])
        standard, _ = nystrom_extend(blocks, "standard")
        revised, _ = nystrom_extend(blocks, "revised")
        np.testing.assert_allclose(standard[2], [2.0, 0.5])
        np.testing.assert_allclose(revised[2], [1.0, 1.0])

    def test_singular_standard(self):
        blocks = _blocks(np.diag([0.0, 1.0]), [[1.0, 1.0]])
        with pytest.raises(SingularEigenvalueError):
            nystrom_extend(blocks, "standard")
        z_tilde, q = nystrom_extend(blocks, "revised")
        assert z_tilde.shape == (3, 2)

    def test_singular_without_extension_rows(self):
        blocks = _blocks(np.diag([0.0, 1.0]), np.zeros((0, 2)))
        z_tilde, _ = nystrom_extend(blocks, "standard")
        assert z_tilde.shape == (2, 2)

    def test_unknown_mode(self):
        with pytest.raises(InvalidParameterError):
            nystrom_extend(_blocks([[1.0]], [[1.0]]), "fast")

    def test_standard_extension_reproduces_columns(self, rgg):
        blocks = partition_kernel(rgg, np.arange(0, rgg.n, 3))
        z_tilde, q = nystrom_extend(blocks, "standard")
        columns = np.vstack([blocks.E, blocks.B.toarray()])
        Z = z_tilde[: blocks.r]
        np.testing.assert_allclose(columns @ Z, z_tilde * q, atol=1e-9)


@pytest.mark.parametrize("mode", ["standard", "revised"])
@pytest.mark.parametrize("seed", range(20))
def test_landmark_rows_are_the_block_eigenvectors(seed, mode):
    g, _ = random_geometric_graph(40, 6, seed=seed)
    M = np.random.default_rng(seed).choice(g.n, size=8, replace=False)
    blocks = partition_kernel(g, M)
    z_tilde, _ = nystrom_extend(blocks, mode)
    _, Z = linalg.eigh(blocks.E)
    np.testing.assert_array_equal(z_tilde[: blocks.r], orient_columns(Z))


class TestNystromMarkovEigs:
    def test_all_landmarks_is_exact(self, weighted_complete):
        g = weighted_complete
        approx = nystrom_markov_eigs(g, np.arange(g.n))
        exact = markov_eigs(g)
        np.testing.assert_allclose(approx.eigenvalues, exact.eigenvalues, atol=1e-12)
        P = markov_matrix(g).entries.toarray()
        np.testing.assert_allclose(
            P @ approx.eigenvectors,
            approx.eigenvectors * approx.eigenvalues,
            atol=1e-10,
        )

    def test_modes_share_spectrum_and_landmark_rows(self, rgg):
        M = [0, 10, 20, 30, 40, 50]
        standard = nystrom_markov_eigs(rgg, M, "standard")
        revised = nystrom_markov_eigs(rgg, M, "revised")
        np.testing.assert_array_equal(standard.eigenvalues, revised.eigenvalues)
        np.testing.assert_array_equal(
            standard.eigenvectors[M], revised.eigenvectors[M]
        )
        assert standard.mode == "standard"
        np.testing.assert_array_equal(revised.landmarks, M)

    def test_shape_and_order(self, rgg):
        basis = nystrom_markov_eigs(rgg, [4, 2, 9])
        assert basis.eigenvectors.shape == (rgg.n, 3)
        assert basis.width == 3
        assert basis.n == rgg.n
        assert np.all(np.diff(basis.eigenvalues) <= 0)


class TestInterpolateNystrom:
    def test_full_samples_reproduce_signal(self, k3):
        s = np.array([0.3, -1.2, 2.0])
        result = interpolate_nystrom(k3, SampleSet([0, 1, 2], s), eta=0.0)
        np.testing.assert_allclose(result.signal, s, atol=1e-9)
        assert result.method == "nystrom"

    def test_single_landmark_on_triangle_is_infeasible(self, k3):
        # E = [[1]] so the only approximate eigenvalue is 0
        with pytest.raises(SolverInfeasibleError):
            interpolate_nystrom(k3, SampleSet([0], [1.0]), eta=0.0)

    @pytest.mark.parametrize("mode", ["standard", "revised"])
    def test_samples_within_eta(self, rgg, mode):
        basis = markov_eigs(rgg)
        s = reconstruct(basis, np.r_[1.0, 0.4, np.zeros(rgg.n - 2)])
        idx = np.arange(0, rgg.n, 4)
        result = interpolate_nystrom(
            rgg, SampleSet.from_signal(s, idx), eta=1e-6, mode=mode
        )
        assert result.signal.shape == (rgg.n,)
        assert np.max(np.abs(result.signal[idx] - s[idx])) <= 1e-6 + 1e-8
        assert result.bandwidth == idx.size

    def test_iterative(self, rgg):
        basis = markov_eigs(rgg)
        s = reconstruct(basis, np.r_[1.0, 0.4, np.zeros(rgg.n - 2)])
        idx = np.arange(0, rgg.n, 6)
        result = interpolate_nystrom(
            rgg, SampleSet.from_signal(s, idx), eta=1e-6, iterative=True
        )
        sizes = [rec.active_size for rec in result.iterations]
        assert sizes[0] == idx.size
        assert sizes == sorted(sizes)
        assert result.bandwidth == sizes[-1]
        assert np.max(np.abs(result.signal[idx] - s[idx])) <= 1e-6 + 1e-8

    def test_unknown_mode(self, k3):
        with pytest.raises(InvalidParameterError):
            interpolate_nystrom(k3, SampleSet([0], [1.0]), mode="fast")
