"""
Tests for the Sum-Adj and M3-SC spectral baselines
"""

import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.baselines import EmbeddingType, mode3_embedding, spec_embedding, sum_adjacency_embedding
from src.cluster import community_cluster_km, misclustering_rate
from src.errors import ArgumentError
from src.generate import MmsbmParams, generate_mmsbm


def _two_cliques(a, b):
    n = a + b
    layer = np.zeros((n, n))
    layer[:a, :a] = 1.0
    layer[a:, a:] = 1.0
    np.fill_diagonal(layer, 0.0)
    return layer[:, :, None]


class TestSumAdjacency:
    """Tests for the node embedding."""

    def test_separates_disconnected_cliques(self):
        """Test that two disjoint cliques land in separate clusters."""
        t = _two_cliques(5, 4)
        embedding = spec_embedding(t, 2, 'Node')
        assert embedding.shape == (9, 2)
        labels = community_cluster_km(embedding, cluster_number=2, seed=0)
        assert misclustering_rate(labels, [0] * 5 + [1] * 4) == 0

    def test_orthonormal_columns(self):
        """Test that the node embedding has orthonormal columns."""
        rng = np.random.default_rng(0)
        t = (rng.random((12, 12, 3)) < 0.3).astype(float)
        U = sum_adjacency_embedding(t, 3)
        np.testing.assert_allclose(U.T @ U, np.eye(3), atol=1e-10)

    def test_orders_by_eigenvalue_magnitude(self):
        """A strongly negative eigenvalue outranks a small positive one."""
        S = np.diag([1.0, -5.0, 3.0])
        U = sum_adjacency_embedding(S[:, :, None], 2)
        np.testing.assert_allclose(np.abs(U), np.eye(3)[:, [1, 2]], atol=1e-12)

    def test_planted_single_type(self):
        """Test node recovery on a planted single-type network."""
        exact = 0
        for seed in range(20):
            gen = generate_mmsbm(MmsbmParams(n=100, m=1, L=8, K=2, d=25, r=0.3, seed=seed))
            embedding = spec_embedding(gen.tensor, 2, EmbeddingType.NODE)
            labels = community_cluster_km(embedding, cluster_number=2, seed=seed)
            if misclustering_rate(labels, gen.truth.memberships[0]) == 0:
                exact += 1
        assert exact >= 19

    def test_rank_out_of_range(self):
        """Test that a rank above n is rejected."""
        with pytest.raises(ArgumentError):
            sum_adjacency_embedding(np.zeros((3, 3, 1)), 4)


class TestMode3:
    """Tests for the layer embedding."""

    def test_identical_layers_collapse(self):
        """Test that identical layers get identical embedding rows."""
        rng = np.random.default_rng(1)
        layer = (rng.random((6, 6)) < 0.5).astype(float)
        t = np.repeat(layer[:, :, None], 5, axis=2)
        embedding = spec_embedding(t, 1, 'layer')
        assert embedding.shape == (5, 1)
        np.testing.assert_allclose(embedding, embedding[0, 0], atol=1e-12)

    def test_separates_layer_types(self):
        """Test layer type recovery on a planted two-type network."""
        gen = generate_mmsbm(MmsbmParams(n=60, m=2, L=10, K=2, d=20, r=0.2, seed=3))
        embedding = mode3_embedding(gen.tensor, 2)
        labels = community_cluster_km(embedding, type='N', cluster_number=2, seed=3)
        assert misclustering_rate(labels, gen.truth.layer_types) == 0

    def test_rank_out_of_range(self):
        """Test that a rank above L is rejected."""
        with pytest.raises(ArgumentError):
            mode3_embedding(np.zeros((3, 3, 2)), 3)

    def test_unknown_type(self):
        """Test that an unknown embedding type is rejected."""
        with pytest.raises(ArgumentError):
            spec_embedding(np.zeros((3, 3, 2)), 1, 'Edge')
