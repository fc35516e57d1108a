"""Tests for sample-set selection."""

import logging

import numpy as np
import pytest

from markov_interp.core.errors import InvalidParameterError
from markov_interp.core.sampling import (
    RANK_TOL,
    SamplingConfig,
    greedy_spectral_sample,
    sampled_sigma_min,
    select_samples,
    uniform_sample,
)
from markov_interp.core.spectral import SpectralBasis, markov_eigs


class TestUniformSample:
    def test_sorted_and_distinct(self):
        nodes = uniform_sample(100, 10, seed=3)
        assert nodes.size == 10
        assert np.all(np.diff(nodes) > 0)
        assert nodes.min() >= 0 and nodes.max() < 100

    def test_seeded(self):
        np.testing.assert_array_equal(
            uniform_sample(100, 10, seed=3), uniform_sample(100, 10, seed=3)
        )
        assert not np.array_equal(
            uniform_sample(1000, 10, seed=3), uniform_sample(1000, 10, seed=4)
        )

    def test_seed_sequence(self):
        a = uniform_sample(50, 5, seed=np.random.SeedSequence([1, 2, 3]))
        b = uniform_sample(50, 5, seed=np.random.SeedSequence([1, 2, 3]))
        np.testing.assert_array_equal(a, b)

    def test_all_nodes(self):
        np.testing.assert_array_equal(uniform_sample(6, 6), np.arange(6))

    @pytest.mark.parametrize("r", [0, 7])
    def test_count_out_of_range(self, r):
        with pytest.raises(InvalidParameterError):
            uniform_sample(6, r)


class TestGreedySpectralSample:
    def test_constant_vector_picks_lowest_index(self, k3):
        nodes = greedy_spectral_sample(markov_eigs(k3), 1, 1)
        np.testing.assert_array_equal(nodes, [0])

    def test_full_rank_selection(self, rgg):
        basis = markov_eigs(rgg)
        nodes = greedy_spectral_sample(basis, 5, 10)
        assert nodes.size == 10
        assert np.unique(nodes).size == 10
        assert np.all(np.diff(nodes) > 0)
        assert sampled_sigma_min(basis, nodes, 5) > RANK_TOL

    def test_deterministic(self, rgg):
        basis = markov_eigs(rgg)
        np.testing.assert_array_equal(
            greedy_spectral_sample(basis, 4, 8), greedy_spectral_sample(basis, 4, 8)
        )

    def test_prefix_property(self, rgg):
        basis = markov_eigs(rgg)
        small = greedy_spectral_sample(basis, 3, 3)
        large = greedy_spectral_sample(basis, 3, 6)
        assert set(small) <= set(large)

    @pytest.mark.parametrize("K, r", [(0, 3), (4, 3), (61, 61)])
    def test_invalid(self, rgg, K, r):
        with pytest.raises(InvalidParameterError):
            greedy_spectral_sample(markov_eigs(rgg), K, r)

    def test_singular_selection_warns(self, caplog):
        vectors = np.ones((4, 2))
        basis = SpectralBasis(np.array([1.0, 0.5]), vectors, vectors, np.ones(4))
        with caplog.at_level(logging.WARNING):
            greedy_spectral_sample(basis, 2, 2)
        assert "numerically singular" in caplog.text


class TestSamplingConfig:
    def test_alias(self):
        assert SamplingConfig("greedy_spectral", r=5, K=2).strategy == "greedy"

    def test_unknown_strategy(self):
        with pytest.raises(InvalidParameterError):
            SamplingConfig("random", r=5)

    def test_greedy_needs_bandwidth(self):
        with pytest.raises(InvalidParameterError):
            SamplingConfig("greedy", r=5)
        with pytest.raises(InvalidParameterError):
            SamplingConfig("greedy", r=2, K=3)

    def test_select_uniform_seed_override(self):
        config = SamplingConfig("uniform", r=4, seed=1)
        np.testing.assert_array_equal(
            select_samples(config, 40, seed=9), uniform_sample(40, 4, seed=9)
        )
        np.testing.assert_array_equal(
            select_samples(config, 40), uniform_sample(40, 4, seed=1)
        )

    def test_select_greedy_needs_basis(self):
        with pytest.raises(InvalidParameterError):
            select_samples(SamplingConfig("greedy", r=2, K=1), 10)
