"""
Spectral Baselines
Sum-Adj node embedding and M3-SC layer embedding.
"""

import logging
from enum import Enum
from typing import Union

import numpy as np
from scipy import linalg

from src.errors import ArgumentError
from src.tensor_core import as_tensor3, fix_signs, top_singular_vectors, unfold

logger = logging.getLogger(__name__)


class EmbeddingType(Enum):
    NODE = "Node"
    LAYER = "Layer"

    @classmethod
    def parse(cls, value) -> 'EmbeddingType':
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ArgumentError(f"Unknown embedding type '{value}', expected Node or Layer")


def sum_adjacency_embedding(tnsr: np.ndarray, rank: int) -> np.ndarray:
    """Top-rank eigenvectors (by |eigenvalue|) of the layer-summed adjacency matrix."""
    tnsr = as_tensor3(tnsr)
    n = tnsr.shape[0]
    if not 1 <= rank <= n:
        raise ArgumentError(f"Node embedding rank {rank} out of range [1, {n}]")

    summed = tnsr.sum(axis=2)
    summed = (summed + summed.T) / 2.0
    eigenvalues, eigenvectors = linalg.eigh(summed)
    # Stable sort keeps the solver's order among equal magnitudes
    order = np.argsort(-np.abs(eigenvalues), kind='stable')[:rank]
    return fix_signs(eigenvectors[:, order].copy())


def mode3_embedding(tnsr: np.ndarray, rank: int) -> np.ndarray:
    """Top-rank left singular vectors of the mode-3 unfolding."""
    tnsr = as_tensor3(tnsr)
    L = tnsr.shape[2]
    if not 1 <= rank <= L:
        raise ArgumentError(f"Layer embedding rank {rank} out of range [1, {L}]")
    return top_singular_vectors(unfold(tnsr, 3), rank)


def spec_embedding(tnsr: np.ndarray, rank: int,
                   embedding_type: Union[str, EmbeddingType] = EmbeddingType.LAYER) -> np.ndarray:
    """
    Spectral embedding whose rows can be fed to k-means.

    Args:
        tnsr: Adjacency tensor
        rank: Number of embedding columns
        embedding_type: 'Node' (Sum-Adj) or 'Layer' (M3-SC)

    Returns:
        ``n x rank`` (Node) or ``L x rank`` (Layer) matrix with orthonormal columns
    """
    kind = EmbeddingType.parse(embedding_type)
    if kind is EmbeddingType.NODE:
        embedding = sum_adjacency_embedding(tnsr, rank)
    else:
        embedding = mode3_embedding(tnsr, rank)
    logger.debug(f"{kind.value} spectral embedding of shape {embedding.shape}")
    return embedding
