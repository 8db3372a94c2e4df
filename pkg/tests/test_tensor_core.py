"""
Tests for tensor algebra primitives
"""

import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import ArgumentError
from src.tensor_core import (
    fix_signs,
    from_values,
    frobenius_norm,
    hosvd,
    mode_multiply,
    multi_mode_multiply,
    reconstruct,
    refold,
    to_values,
    top_singular_vectors,
    unfold,
)


def _low_rank_tensor(rng, dims, ranks):
    core = rng.normal(size=ranks)
    factors = [np.linalg.qr(rng.normal(size=(d, r)))[0] for d, r in zip(dims, ranks)]
    return multi_mode_multiply(core, factors)


class TestUnfold:
    """Tests for unfolding and refolding."""

    def test_singleton(self):
        """Test unfolding a 1x1x1 tensor."""
        t = from_values((1, 1, 1), [5.0])
        assert unfold(t, 1).tolist() == [[5.0]]

    def test_mode3_rows_follow_linearization(self):
        """Row k of the mode-3 unfolding lists slice k with i fastest."""
        t = from_values((2, 2, 2), np.arange(8))
        assert unfold(t, 3).tolist() == [[0, 1, 2, 3], [4, 5, 6, 7]]

    def test_linearization_is_mode1_fastest(self):
        """Test the mode-1-fastest linearization."""
        t = from_values((2, 3, 2), np.arange(12))
        assert t[1, 0, 0] == 1
        assert t[0, 1, 0] == 2
        assert t[0, 0, 1] == 6
        np.testing.assert_array_equal(to_values(t), np.arange(12))

    def test_rank_one_unfolding(self):
        """Test the unfolding of a rank-one tensor."""
        rng = np.random.default_rng(0)
        u, v, w = rng.normal(size=3), rng.normal(size=4), rng.normal(size=2)
        t = np.einsum('i,j,k->ijk', u, v, w)
        assert np.linalg.matrix_rank(unfold(t, 1)) == 1
        np.testing.assert_allclose(unfold(t, 1), np.outer(u, np.kron(w, v)), atol=1e-12)

    def test_refold_inverts_unfold(self):
        """Test that refold inverts unfold."""
        rng = np.random.default_rng(1)
        for _ in range(200):
            dims = tuple(rng.integers(1, 9, size=3))
            t = rng.normal(size=dims)
            for mode in (1, 2, 3):
                np.testing.assert_allclose(refold(unfold(t, mode), mode, dims), t, atol=1e-12)

    def test_invalid_mode(self):
        """Test that modes outside 1 to 3 are rejected."""
        with pytest.raises(ArgumentError):
            unfold(np.zeros((2, 2, 2)), 4)

    def test_refold_shape_mismatch(self):
        """Test refolding into incompatible dims."""
        with pytest.raises(ArgumentError):
            refold(np.zeros((2, 3)), 1, (2, 2, 2))


class TestModeProducts:
    """Tests for mode-k products."""

    def test_layer_sum(self):
        """Test a mode-3 product with a row of ones."""
        t = from_values((2, 2, 2), np.arange(8))
        summed = mode_multiply(t, np.array([[1.0, 1.0]]), 3)
        assert summed.shape == (2, 2, 1)
        np.testing.assert_array_equal(summed[:, :, 0], t[:, :, 0] + t[:, :, 1])

    def test_product_matches_unfolding(self):
        """Test the mode product against its unfolding identity."""
        rng = np.random.default_rng(2)
        t = rng.normal(size=(3, 4, 5))
        M = rng.normal(size=(2, 4))
        product = mode_multiply(t, M, 2)
        np.testing.assert_allclose(unfold(product, 2), M @ unfold(t, 2), atol=1e-12)

    def test_same_mode_associativity(self):
        """Test that repeated products on one mode compose."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            dims = tuple(rng.integers(1, 9, size=3))
            t = rng.normal(size=dims)
            mode = int(rng.integers(1, 4))
            A = rng.normal(size=(3, dims[mode - 1]))
            B = rng.normal(size=(2, 3))
            np.testing.assert_allclose(
                mode_multiply(mode_multiply(t, A, mode), B, mode),
                mode_multiply(t, B @ A, mode),
                atol=1e-12,
            )

    def test_orthogonal_product_preserves_norm(self):
        """Test that orthogonal products preserve the norm."""
        rng = np.random.default_rng(4)
        for _ in range(50):
            dims = tuple(rng.integers(1, 9, size=3))
            t = rng.normal(size=dims)
            Q = np.linalg.qr(rng.normal(size=(dims[0], dims[0])))[0]
            assert abs(frobenius_norm(mode_multiply(t, Q, 1)) - frobenius_norm(t)) < 1e-10

    def test_dimension_mismatch(self):
        """Test that a mismatched matrix is rejected."""
        with pytest.raises(ArgumentError):
            mode_multiply(np.zeros((2, 3, 4)), np.zeros((2, 2)), 3)

    def test_skip_and_none(self):
        """Test skipping modes in a multi-mode product."""
        rng = np.random.default_rng(5)
        t = rng.normal(size=(3, 3, 2))
        A = rng.normal(size=(2, 3))
        skipped = multi_mode_multiply(t, [A, A, None], skip=2)
        np.testing.assert_allclose(skipped, mode_multiply(t, A, 1))


class TestSingularVectors:
    """Tests for truncated SVD helpers."""

    def test_diagonal_matrix(self):
        """Test singular vectors of a diagonal matrix."""
        U = top_singular_vectors(np.diag([3.0, 2.0, 1.0]), 2)
        np.testing.assert_allclose(U, np.eye(3)[:, :2], atol=1e-12)

    def test_symmetric_psd_matches_eigenvectors(self):
        """Test that PSD singular vectors match eigenvectors."""
        rng = np.random.default_rng(6)
        X = rng.normal(size=(5, 5))
        S = X @ X.T
        U = top_singular_vectors(S, 2)
        values, vectors = np.linalg.eigh(S)
        top = vectors[:, np.argsort(values)[::-1][:2]]
        np.testing.assert_allclose(np.abs(U.T @ top), np.eye(2), atol=1e-8)

    def test_sign_convention(self):
        """Test the sign convention of singular vectors."""
        rng = np.random.default_rng(7)
        U = top_singular_vectors(rng.normal(size=(6, 4)), 2)
        pivots = np.argmax(np.abs(U), axis=0)
        assert (U[pivots, [0, 1]] > 0).all()

    def test_fix_signs_flips_negative_pivot(self):
        """Test that fix_signs flips negative pivots."""
        v = np.array([[0.1], [-0.9]])
        np.testing.assert_array_equal(fix_signs(v), [[-0.1], [0.9]])

    def test_rank_out_of_range(self):
        """Test that a rank above the matrix size is rejected."""
        with pytest.raises(ArgumentError):
            top_singular_vectors(np.eye(3), 4)
        with pytest.raises(ArgumentError):
            top_singular_vectors(np.eye(3), 0)


class TestHosvd:
    """Tests for HOSVD."""

    def test_exact_low_rank_reconstruction(self):
        """Test that HOSVD reconstructs exact low-rank tensors."""
        rng = np.random.default_rng(8)
        for _ in range(50):
            ranks = (int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(1, 4)))
            dims = tuple(int(r + rng.integers(0, 8)) for r in ranks)
            t = _low_rank_tensor(rng, dims, ranks)
            core, factors = hosvd(t, ranks)
            error = frobenius_norm(t - reconstruct(core, factors))
            assert error <= 1e-10 * frobenius_norm(t)

    def test_full_rank_is_lossless(self):
        """Test that full ranks are lossless."""
        rng = np.random.default_rng(9)
        t = rng.normal(size=(4, 5, 3))
        core, factors = hosvd(t, t.shape)
        np.testing.assert_allclose(reconstruct(core, factors), t, atol=1e-10)
        for U in factors:
            np.testing.assert_allclose(U.T @ U, np.eye(U.shape[1]), atol=1e-10)

    def test_zero_tensor(self):
        """Test HOSVD of the zero tensor."""
        core, factors = hosvd(np.zeros((3, 3, 2)), (2, 2, 1))
        assert np.all(core == 0)
        assert [U.shape for U in factors] == [(3, 2), (3, 2), (2, 1)]

    def test_wide_unfolding_allows_rank_up_to_dim(self):
        """Mode-3 rank may exceed the unfolding's column count when other dims are small."""
        rng = np.random.default_rng(10)
        t = rng.normal(size=(1, 1, 4))
        _, factors = hosvd(t, (1, 1, 3))
        np.testing.assert_allclose(factors[2].T @ factors[2], np.eye(3), atol=1e-12)

    def test_rank_out_of_range(self):
        """Test that ranks above the dims are rejected."""
        with pytest.raises(ArgumentError):
            hosvd(np.zeros((3, 3, 2)), (4, 2, 1))
