"""
Tests for TWIST / Tucker power iteration
"""

import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.baselines import sum_adjacency_embedding
from src.cluster import community_cluster_km, misclustering_rate
from src.embed_twist import (
    IterationType,
    TwistConfig,
    _truncate_rows,
    default_ranks,
    initialization_mmsbm,
    power_iteration,
)
from src.errors import ArgumentError
from src.generate import MmsbmParams, generate_mmsbm
from src.tensor_core import frobenius_norm, multi_mode_multiply, projector_distance, reconstruct


def _planted(seed):
    return generate_mmsbm(MmsbmParams(n=100, m=2, L=12, K=2, d=25, r=0.3, seed=seed))


class TestDefaultRanks:
    """Tests for the rank rule."""

    def test_examples(self):
        """Test the rank rule on known cases."""
        assert default_ranks(1, 2) == (2, 2, 1)
        assert default_ranks(2, 3) == (5, 5, 2)
        assert default_ranks(1, 1) == (1, 1, 1)

    def test_formula_grid(self):
        """Test the rank rule over a grid of m and K."""
        for m in range(1, 7):
            for K in range(1, 7):
                r = m * K - (m - 1)
                assert default_ranks(m, K) == (r, r, m)

    def test_invalid(self):
        """Test that non-positive m or K is rejected."""
        with pytest.raises(ArgumentError):
            default_ranks(0, 2)


class TestConfig:
    """Tests for TwistConfig validation."""

    def test_parses_type(self):
        """Test parsing the iteration type."""
        cfg = TwistConfig(ranks=[2, 2, 1], type='tucker')
        assert cfg.type is IterationType.TUCKER
        assert cfg.ranks == (2, 2, 1)

    @pytest.mark.parametrize('kwargs', [
        {'ranks': (2, 2)},
        {'ranks': (2, 0, 1)},
        {'ranks': (2, 2, 1), 'delta1': 0.0},
        {'ranks': (2, 2, 1), 'tol': 0.0},
        {'ranks': (2, 2, 1), 'max_iter': 0},
        {'ranks': (2, 2, 1), 'type': 'HOOI'},
    ])
    def test_rejects_invalid(self, kwargs):
        """Test TwistConfig validation."""
        with pytest.raises(ArgumentError):
            TwistConfig(**kwargs)


class TestInitialization:
    """Tests for HOSVD initialization."""

    def test_spans_exact_subspaces(self):
        """Test that HOSVD spans the subspaces of an exact input."""
        rng = np.random.default_rng(0)
        factors = [np.linalg.qr(rng.normal(size=(d, r)))[0] for d, r in ((8, 2), (8, 2), (5, 2))]
        t = multi_mode_multiply(rng.normal(size=(2, 2, 2)), factors)
        U = initialization_mmsbm(t, (2, 2, 2))
        for estimate, truth in zip(U, factors):
            np.testing.assert_allclose(estimate @ estimate.T, truth @ truth.T, atol=1e-8)

    def test_full_ranks_give_bases(self):
        """Test that full ranks give full orthonormal bases."""
        rng = np.random.default_rng(1)
        U = initialization_mmsbm(rng.normal(size=(4, 4, 3)), (4, 4, 3))
        for factor in U:
            np.testing.assert_allclose(factor.T @ factor, np.eye(factor.shape[0]), atol=1e-10)

    def test_ranks_from_types_and_communities(self):
        """Test ranks derived from m and K."""
        rng = np.random.default_rng(2)
        U = initialization_mmsbm(rng.random((10, 10, 4)), m=2, K=2)
        assert [u.shape for u in U] == [(10, 3), (10, 3), (4, 2)]

    def test_needs_ranks_or_model_size(self):
        """Test that ranks or m and K are required."""
        with pytest.raises(ArgumentError):
            initialization_mmsbm(np.zeros((4, 4, 2)), m=2)


class TestPowerIteration:
    """Tests for power_iteration."""

    def test_exact_input_is_fixed_point(self):
        """Test that an exact low-rank input is a fixed point."""
        rng = np.random.default_rng(3)
        factors = [np.linalg.qr(rng.normal(size=(d, r)))[0] for d, r in ((9, 3), (9, 3), (6, 2))]
        t = multi_mode_multiply(rng.normal(size=(3, 3, 2)), factors)
        result = power_iteration(t, TwistConfig(ranks=(3, 3, 2), type='Tucker'))
        assert result.converged
        assert result.iterations <= 2
        error = frobenius_norm(t - reconstruct(result.Z, result.factors))
        assert error <= 1e-10 * frobenius_norm(t)

    def test_inactive_regularization_matches_tucker(self):
        """Test that huge deltas reproduce Tucker bit for bit."""
        rng = np.random.default_rng(4)
        for _ in range(10):
            t = rng.random((12, 12, 5))
            twist = power_iteration(t, TwistConfig(ranks=(3, 3, 2), type='TWIST',
                                                   delta1=1e18, delta2=1e18))
            tucker = power_iteration(t, TwistConfig(ranks=(3, 3, 2), type='Tucker'))
            np.testing.assert_array_equal(twist.node_embedding, tucker.node_embedding)
            np.testing.assert_array_equal(twist.layer_embedding, tucker.layer_embedding)
            np.testing.assert_array_equal(twist.Z, tucker.Z)
            assert twist.iterations == tucker.iterations

    def test_non_conformal_start(self):
        """Test that a non-conformal start is rejected."""
        t = np.random.default_rng(5).random((6, 6, 3))
        U0 = [np.eye(6)[:, :2], np.eye(6)[:, :2], np.eye(3)[:, :1]]
        with pytest.raises(ArgumentError):
            power_iteration(t, TwistConfig(ranks=(2, 2, 2)), U0=U0)

    def test_max_iter_reached_is_not_an_error(self):
        """Test that hitting max_iter returns unconverged."""
        t = np.random.default_rng(6).random((10, 10, 4))
        result = power_iteration(t, TwistConfig(ranks=(2, 2, 2), max_iter=1, tol=1e-300))
        assert not result.converged
        assert result.iterations == 1
        assert result.to_dict()['converged'] is False

    def test_tight_regularization_keeps_orthonormal_factors(self):
        """Test that tight deltas keep factors orthonormal."""
        t = np.random.default_rng(7).random((10, 10, 4))
        result = power_iteration(t, TwistConfig(ranks=(2, 2, 2), delta1=0.01, delta2=0.01))
        for factor in result.factors:
            np.testing.assert_allclose(factor.T @ factor, np.eye(factor.shape[1]), atol=1e-10)

    def test_truncate_rows(self):
        """Test row truncation at delta."""
        M = np.array([[3.0, 4.0], [0.3, 0.4]])
        np.testing.assert_allclose(_truncate_rows(M, 1.0), [[0.6, 0.8], [0.3, 0.4]])
        assert _truncate_rows(M, 10.0) is M

    def test_planted_layer_types_recovered(self):
        """Test layer and node recovery on planted networks."""
        exact = 0
        node_rates = []
        for seed in range(20):
            gen = _planted(seed)
            result = power_iteration(gen.tensor, TwistConfig(ranks=default_ranks(2, 2)))
            layer_labels = community_cluster_km(result.layer_embedding, type='N',
                                                cluster_number=2, seed=seed).labels
            if misclustering_rate(layer_labels, gen.truth.layer_types) == 0:
                exact += 1

            for cluster in np.unique(layer_labels):
                layers = layer_labels == cluster
                planted_type = np.bincount(gen.truth.layer_types[layers]).argmax()
                # Mean fitted slice over the layers of this type
                weights = result.layer_embedding[layers].mean(axis=0)
                slice_core = np.tensordot(result.Z, weights, axes=([2], [0]))
                theta = result.factors[0] @ slice_core @ result.factors[1].T
                nodes = sum_adjacency_embedding(theta[:, :, None], 2)
                node_labels = community_cluster_km(nodes, cluster_number=2, seed=seed)
                node_rates.append(
                    misclustering_rate(node_labels, gen.truth.memberships[planted_type]))
        assert exact >= 19
        assert np.mean(node_rates) <= 0.05

    def test_objective_non_decreasing(self):
        """Test that the Tucker objective never decreases."""
        for seed in range(3):
            gen = _planted(seed)
            result = power_iteration(gen.tensor, TwistConfig(ranks=(3, 3, 2), type='Tucker'))
            trace = result.objective_trace
            assert len(trace) == result.iterations + 1
            for before, after in zip(trace, trace[1:]):
                assert after >= before - 1e-9 * trace[0]

    def test_symmetric_input_gives_equal_node_subspaces(self):
        """Test that modes 1 and 2 converge to the same subspace on symmetric layers."""
        for seed in range(3):
            gen = _planted(seed)
            cfg = TwistConfig(ranks=(3, 3, 2), max_iter=200, tol=1e-10)
            result = power_iteration(gen.tensor, cfg)
            assert result.converged
            assert projector_distance(result.factors[0], result.factors[1]) <= 1e-8
