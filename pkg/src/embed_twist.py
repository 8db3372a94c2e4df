"""
TWIST Embedding
Tucker-based node and layer embedding of an adjacency tensor: HOSVD initialization
followed by regularized tensor power iteration (TWIST) or plain HOOI (Tucker).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ArgumentError
from src.settings import DEFAULT_DELTA, DEFAULT_MAX_ITER, DEFAULT_TOL
from src.tensor_core import (
    as_tensor3,
    check_ranks,
    frobenius_norm,
    hosvd,
    left_basis,
    multi_mode_multiply,
    projector_distance,
    unfold,
)

logger = logging.getLogger(__name__)


class IterationType(Enum):
    TWIST = "TWIST"
    TUCKER = "Tucker"

    @classmethod
    def parse(cls, value) -> 'IterationType':
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ArgumentError(f"Unknown iteration type '{value}', expected TWIST or Tucker")


@dataclass(frozen=True)
class TwistConfig:
    """Power iteration settings."""
    ranks: Tuple[int, int, int]
    type: IterationType = IterationType.TWIST
    delta1: float = DEFAULT_DELTA
    delta2: float = DEFAULT_DELTA
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, 'ranks', tuple(int(r) for r in self.ranks))
        object.__setattr__(self, 'type', IterationType.parse(self.type))
        if len(self.ranks) != 3 or min(self.ranks) < 1:
            raise ArgumentError(f"Ranks must be three positive integers, got {self.ranks}")
        if not (self.delta1 > 0 and self.delta2 > 0):
            raise ArgumentError(f"delta1 and delta2 must be positive, got {self.delta1}, {self.delta2}")
        if not self.tol > 0:
            raise ArgumentError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ArgumentError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class EmbeddingResult:
    """Core tensor plus orthonormal node (mode-1) and layer (mode-3) embeddings."""
    Z: np.ndarray
    node_embedding: np.ndarray
    layer_embedding: np.ndarray
    iterations: int
    converged: bool
    factors: List[np.ndarray] = field(default_factory=list)
    objective_trace: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'core_dims': list(self.Z.shape),
            'iterations': self.iterations,
            'converged': self.converged,
            'objective': self.objective_trace[-1] if self.objective_trace else None,
        }


def default_ranks(m: int, K: int) -> Tuple[int, int, int]:
    """
    Core ranks for ``m`` network types with ``K`` communities each.

    Modes 1 and 2 use ``m * K - (m - 1)``; mode 3 uses ``m``.
    """
    if m < 1 or K < 1:
        raise ArgumentError(f"m and K must be >= 1, got m={m}, K={K}")
    r = m * K - (m - 1)
    return r, r, m


def initialization_mmsbm(tnsr: np.ndarray,
                         ranks: Optional[Sequence[int]] = None,
                         m: Optional[int] = None,
                         K: Optional[int] = None) -> List[np.ndarray]:
    """
    HOSVD initialization for power iteration.

    Args:
        tnsr: Adjacency tensor
        ranks: Core ranks; derived from ``(m, K)`` when absent
        m: Number of network types
        K: Communities per type

    Returns:
        [U1, U2, U3] orthonormal factor matrices
    """
    tnsr = as_tensor3(tnsr)
    if ranks is None:
        if m is None or K is None:
            raise ArgumentError("Provide ranks or both m and K")
        ranks = default_ranks(m, K)

    _, factors = hosvd(tnsr, ranks)
    return factors


def _truncate_rows(matrix: np.ndarray, delta: float) -> np.ndarray:
    """Rescale rows whose Euclidean norm exceeds ``delta`` down to ``delta``."""
    norms = np.linalg.norm(matrix, axis=1)
    over = norms > delta
    if not over.any():
        return matrix
    truncated = matrix.copy()
    truncated[over] *= (delta / norms[over])[:, None]
    return truncated


def _check_conformal(tnsr: np.ndarray, ranks: Tuple[int, int, int],
                     U0: Sequence[np.ndarray]) -> List[np.ndarray]:
    if len(U0) != 3:
        raise ArgumentError(f"Expected three initial factors, got {len(U0)}")
    factors = []
    for k, (u, n, r) in enumerate(zip(U0, tnsr.shape, ranks)):
        u = np.asarray(u, dtype=float)
        if u.shape != (n, r):
            raise ArgumentError(f"Initial factor {k + 1} has shape {u.shape}, expected {(n, r)}")
        factors.append(u)
    return factors


def power_iteration(tnsr: np.ndarray,
                    cfg: TwistConfig,
                    U0: Optional[Sequence[np.ndarray]] = None) -> EmbeddingResult:
    """
    Alternating power iteration (HOOI) with optional TWIST row regularization.

    Each sweep updates modes 1, 2, 3 in order. Under TWIST the working matrix of modes
    1 and 2 has rows longer than ``delta_k`` shrunk to ``delta_k`` before its SVD.

    Args:
        tnsr: Adjacency tensor
        cfg: Iteration settings
        U0: Initial factors; HOSVD of ``tnsr`` when absent

    Returns:
        EmbeddingResult; ``converged`` is False when ``max_iter`` is reached first
    """
    tnsr = as_tensor3(tnsr)
    ranks = check_ranks(cfg.ranks, tnsr.shape)
    if U0 is None:
        U0 = initialization_mmsbm(tnsr, ranks)
    factors = _check_conformal(tnsr, ranks, U0)

    deltas = {1: cfg.delta1, 2: cfg.delta2}
    regularize = cfg.type is IterationType.TWIST

    objective_trace = [frobenius_norm(multi_mode_multiply(tnsr, factors, transpose=True))]
    converged = False
    iterations = 0

    for sweep in range(1, cfg.max_iter + 1):
        previous = [u.copy() for u in factors]

        for mode in (1, 2, 3):
            partial = multi_mode_multiply(tnsr, factors, transpose=True, skip=mode)
            working = unfold(partial, mode)
            if regularize and mode in deltas:
                working = _truncate_rows(working, deltas[mode])
            factors[mode - 1] = left_basis(working, ranks[mode - 1])

        iterations = sweep
        objective_trace.append(frobenius_norm(multi_mode_multiply(tnsr, factors, transpose=True)))
        change = max(projector_distance(u, v) for u, v in zip(factors, previous))
        logger.debug(f"{cfg.type.value} sweep {sweep}: projector change {change:.3e}")

        if change <= cfg.tol:
            converged = True
            break

    Z = multi_mode_multiply(tnsr, factors, transpose=True)
    if converged:
        logger.info(f"{cfg.type.value} converged after {iterations} sweeps")
    else:
        logger.warning(f"{cfg.type.value} stopped at max_iter={cfg.max_iter} without converging")

    return EmbeddingResult(
        Z=Z,
        node_embedding=factors[0],
        layer_embedding=factors[2],
        iterations=iterations,
        converged=converged,
        factors=factors,
        objective_trace=objective_trace,
    )
