"""
Tensor Core
Dense order-3 tensor arithmetic: unfoldings, mode products, truncated SVD and HOSVD.

Tensors are plain ``numpy.ndarray`` objects of shape ``(n1, n2, n3)``. The canonical
linearization is mode-1 fastest (Fortran order), so entry ``(i, j, k)`` sits at
``i + n1 * j + n1 * n2 * k``. Mode-k unfoldings put mode k on the rows and let the
lower-numbered remaining mode vary fastest along the columns.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from src.errors import ArgumentError

logger = logging.getLogger(__name__)

VALID_MODES = (1, 2, 3)


def as_tensor3(values) -> np.ndarray:
    """Validate and return a float64 order-3 array."""
    t = np.asarray(values, dtype=float)
    if t.ndim != 3:
        raise ArgumentError(f"Expected an order-3 tensor, got {t.ndim} dimensions")
    if min(t.shape) < 1:
        raise ArgumentError(f"Tensor dims must be positive, got {t.shape}")
    return t


def from_values(dims: Sequence[int], values: Sequence[float]) -> np.ndarray:
    """Build a tensor from its mode-1-fastest linearization."""
    dims = tuple(int(d) for d in dims)
    flat = np.asarray(values, dtype=float).ravel()
    expected = int(np.prod(dims))
    if len(dims) != 3 or flat.size != expected:
        raise ArgumentError(f"Need {expected} values for dims {dims}, got {flat.size}")
    return flat.reshape(dims, order='F')


def to_values(t: np.ndarray) -> np.ndarray:
    """Return the mode-1-fastest linearization of a tensor."""
    return as_tensor3(t).ravel(order='F')


def _check_mode(mode: int) -> int:
    if mode not in VALID_MODES:
        raise ArgumentError(f"Mode must be one of {VALID_MODES}, got {mode}")
    return mode - 1


def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """
    Mode-k unfolding.

    Args:
        t: Order-3 tensor
        mode: 1, 2 or 3

    Returns:
        Matrix of shape ``(n_k, prod(other dims))``
    """
    axis = _check_mode(mode)
    t = as_tensor3(t)
    return np.reshape(np.moveaxis(t, axis, 0), (t.shape[axis], -1), order='F')


def refold(matrix: np.ndarray, mode: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold` for a tensor of the given dims."""
    axis = _check_mode(mode)
    dims = tuple(int(d) for d in dims)
    matrix = np.asarray(matrix, dtype=float)
    other = [dims[j] for j in range(3) if j != axis]
    if matrix.shape != (dims[axis], other[0] * other[1]):
        raise ArgumentError(
            f"Cannot refold a {matrix.shape} matrix into dims {dims} along mode {mode}"
        )
    full = np.reshape(matrix, [dims[axis]] + other, order='F')
    return np.moveaxis(full, 0, axis)


def mode_multiply(t: np.ndarray, matrix: np.ndarray, mode: int) -> np.ndarray:
    """
    Mode-k product ``t x_k M``.

    The result replaces dimension k with ``M.rows``.
    """
    axis = _check_mode(mode)
    t = as_tensor3(t)
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != t.shape[axis]:
        raise ArgumentError(
            f"Mode-{mode} product needs {t.shape[axis]} matrix columns, got shape {matrix.shape}"
        )
    product = np.tensordot(matrix, t, axes=(1, axis))
    return np.moveaxis(product, 0, axis)


def multi_mode_multiply(t: np.ndarray,
                        matrices: Sequence[Optional[np.ndarray]],
                        transpose: bool = False,
                        skip: Optional[int] = None) -> np.ndarray:
    """
    Apply one matrix per mode in order 1, 2, 3.

    Args:
        t: Order-3 tensor
        matrices: Three matrices; ``None`` entries are skipped
        transpose: Multiply by the transposes instead
        skip: Mode (1-based) to leave untouched
    """
    result = as_tensor3(t)
    for axis, matrix in enumerate(matrices):
        if matrix is None or skip == axis + 1:
            continue
        m = np.asarray(matrix, dtype=float)
        result = mode_multiply(result, m.T if transpose else m, axis + 1)
    return result


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (lowest index on ties)."""
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def top_singular_vectors(matrix: np.ndarray, r: int) -> np.ndarray:
    """
    Orthonormal basis of the top-r left singular subspace.

    Args:
        matrix: Real matrix
        r: Number of vectors, ``1 <= r <= min(rows, cols)``

    Returns:
        ``rows x r`` matrix with the deterministic sign convention applied
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ArgumentError(f"Expected a matrix, got {matrix.ndim} dimensions")
    rows, cols = matrix.shape
    if not 1 <= r <= min(rows, cols):
        raise ArgumentError(f"Rank {r} out of range [1, {min(rows, cols)}] for a {rows}x{cols} matrix")

    u, _, _ = linalg.svd(matrix, full_matrices=False)
    return fix_signs(u[:, :r].copy())


def left_basis(matrix: np.ndarray, r: int) -> np.ndarray:
    """Top-r left singular vectors allowing ``r`` up to the row count."""
    rows, cols = matrix.shape
    if r <= min(rows, cols):
        return top_singular_vectors(matrix, r)
    # Complete the basis when the unfolding is wide-short
    u, _, _ = linalg.svd(matrix, full_matrices=True)
    return fix_signs(u[:, :r].copy())


def hosvd(t: np.ndarray, ranks: Sequence[int]) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Truncated higher-order SVD.

    Args:
        t: Order-3 tensor
        ranks: ``(r1, r2, r3)`` with ``1 <= r_k <= dims[k]``

    Returns:
        Tuple of (core tensor, [U1, U2, U3])
    """
    t = as_tensor3(t)
    ranks = check_ranks(ranks, t.shape)

    factors = [left_basis(unfold(t, k + 1), ranks[k]) for k in range(3)]
    core = multi_mode_multiply(t, factors, transpose=True)
    logger.debug(f"HOSVD of {t.shape} tensor with ranks {ranks}")
    return core, factors


def check_ranks(ranks: Sequence[int], dims: Sequence[int]) -> Tuple[int, int, int]:
    """Validate a rank triple against tensor dims."""
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != 3:
        raise ArgumentError(f"Expected three ranks, got {ranks}")
    for k, (r, n) in enumerate(zip(ranks, dims)):
        if not 1 <= r <= n:
            raise ArgumentError(f"Mode-{k + 1} rank {r} out of range [1, {n}]")
    return ranks


def reconstruct(core: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Tucker reconstruction ``core x1 U1 x2 U2 x3 U3``."""
    return multi_mode_multiply(core, factors)


def frobenius_norm(t: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(t).ravel()))


def projector_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance between the orthogonal projectors onto span(a) and span(b)."""
    return float(np.linalg.norm(a @ a.T - b @ b.T))
