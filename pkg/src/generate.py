"""
Network Generators
Synthetic mixture multilayer networks under the mixture multilayer stochastic block model
(MMSBM) and the mixture multilayer latent space model (MMLSM).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize, stats

from src.errors import ArgumentError, InfeasibleParametersError
from src.links import LinkType, link_value
from src.settings import (
    DEFAULT_CMAX,
    DEFAULT_DEGREE_FRACTION,
    DEFAULT_OUT_IN_RATIO,
    DEFAULT_SCALE_PAR,
    DEFAULT_U_MEAN,
    get_max_workers,
)
from src.tensor_core import multi_mode_multiply

logger = logging.getLogger(__name__)


class CoreDistribution(Enum):
    UNIFORM = "Uniform"
    NORM = "Norm"

    @classmethod
    def parse(cls, value) -> 'CoreDistribution':
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ArgumentError(f"Unknown int_type '{value}', expected Uniform or Norm")


@dataclass(frozen=True)
class MmsbmParams:
    """Parameters of the mixture multilayer stochastic block model."""
    n: int
    m: int
    L: int
    K: int
    d: Optional[float] = None
    r: Optional[float] = None
    seed: Optional[int] = None
    shared_memberships: bool = False

    def __post_init__(self):
        if not self.n >= self.K >= 1:
            raise ArgumentError(f"Need n >= K >= 1, got n={self.n}, K={self.K}")
        if not self.L >= self.m >= 1:
            raise ArgumentError(f"Need L >= m >= 1, got L={self.L}, m={self.m}")
        if self.r is not None and not 0 < self.r <= 1:
            raise ArgumentError(f"Out-in ratio r must lie in (0, 1], got {self.r}")
        if self.d is not None and not 0 < self.d < self.n:
            raise ArgumentError(f"Average degree d must lie in (0, n), got {self.d}")

    @property
    def degree(self) -> float:
        return float(self.d) if self.d is not None else self.n * DEFAULT_DEGREE_FRACTION

    @property
    def out_in_ratio(self) -> float:
        return float(self.r) if self.r is not None else DEFAULT_OUT_IN_RATIO


@dataclass(frozen=True)
class MmlsmParams:
    """Parameters of the mixture multilayer latent space model."""
    n: int
    m: int
    L: int
    rank: int
    u_mean: float = DEFAULT_U_MEAN
    cmax: float = DEFAULT_CMAX
    d: Optional[float] = None
    int_type: str = CoreDistribution.UNIFORM.value
    kernel_fun: str = LinkType.LOGIT.value
    scale_par: float = DEFAULT_SCALE_PAR
    seed: Optional[int] = None

    def __post_init__(self):
        if self.n < 2:
            raise ArgumentError(f"Need at least 2 nodes, got n={self.n}")
        if not self.L >= self.m >= 1:
            raise ArgumentError(f"Need L >= m >= 1, got L={self.L}, m={self.m}")
        if self.rank < 1:
            raise ArgumentError(f"rank must be >= 1, got {self.rank}")
        if not self.cmax > 0:
            raise ArgumentError(f"cmax must be positive, got {self.cmax}")
        if not self.scale_par > 0:
            raise ArgumentError(f"scale_par must be positive, got {self.scale_par}")
        if self.d is not None and not 0 < self.d < self.n:
            raise ArgumentError(f"Average degree d must lie in (0, n), got {self.d}")
        CoreDistribution.parse(self.int_type)
        if LinkType.parse(self.kernel_fun) is LinkType.POISSON:
            raise ArgumentError("kernel_fun must be logit or probit for binary generation")


@dataclass
class GroundTruth:
    """Planted structure carried along for evaluation."""
    layer_types: np.ndarray
    memberships: Optional[np.ndarray] = None  # (m, n) community labels, MMSBM
    U: Optional[np.ndarray] = None  # (n, rank) latent positions, MMLSM
    W: Optional[np.ndarray] = None  # (L, m) one-hot layer loadings, MMLSM
    C: Optional[np.ndarray] = None  # (rank, rank, m) core, MMLSM


@dataclass
class GenList:
    """Adjacency tensor plus the parameters that generated it."""
    tensor: np.ndarray
    theta: np.ndarray
    truth: GroundTruth
    block_matrix: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


def round_robin_layer_types(L: int, m: int) -> np.ndarray:
    """Layer l gets type ``l mod m``."""
    return np.arange(L) % m


def solve_block_probabilities(n: int, K: int, d: float, r: float) -> Tuple[float, float]:
    """
    Solve the planted-partition calibration for (p_in, p_out).

    Expected degree ``(n/K - 1) * p_in + (n - n/K) * p_out = d`` with ``p_out = r * p_in``.
    """
    block_size = n / K
    denominator = (block_size - 1) + (n - block_size) * r
    if denominator <= 0:
        raise InfeasibleParametersError(
            f"Degree equation has no positive solution for n={n}, K={K}, r={r}"
        )
    p_in = d / denominator
    if p_in > 1.0:
        raise InfeasibleParametersError(
            f"Solved p_in={p_in:.6f} > 1: degree d={d} and ratio r={r} are incompatible "
            f"with n={n}, K={K}"
        )
    return p_in, r * p_in


def block_connectivity(K: int, p_in: float, p_out: float) -> np.ndarray:
    """``B = (p_in - p_out) I_K + p_out J_K``."""
    return (p_in - p_out) * np.eye(K) + p_out * np.ones((K, K))


def _root_entropy(seed: Optional[int]) -> int:
    return np.random.SeedSequence(seed).entropy


def _structure_rng(entropy: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(0,)))


def _layer_rng(entropy: int, layer: int) -> np.random.Generator:
    # Keyed by layer index only, so a layer's edges do not depend on L
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(1, layer)))


def _sample_layer(probabilities: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Bernoulli edges on the upper triangle, mirrored, zero diagonal."""
    n = probabilities.shape[0]
    rows, cols = np.triu_indices(n, k=1)
    edges = (rng.random(rows.size) < probabilities[rows, cols]).astype(float)
    layer = np.zeros((n, n))
    layer[rows, cols] = edges
    layer[cols, rows] = edges
    return layer


def sample_adjacency(probabilities: np.ndarray, entropy: int) -> np.ndarray:
    """Sample every layer of a probability tensor with per-layer RNG streams."""
    n_layers = probabilities.shape[2]

    def _job(layer: int) -> np.ndarray:
        return _sample_layer(probabilities[:, :, layer], _layer_rng(entropy, layer))

    with ThreadPoolExecutor(max_workers=get_max_workers()) as pool:
        layers: List[np.ndarray] = list(pool.map(_job, range(n_layers)))

    return np.stack(layers, axis=2)


def _balanced_memberships(n: int, K: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(np.arange(n) % K)


def generate_mmsbm(params: MmsbmParams) -> GenList:
    """
    Generate a mixture multilayer stochastic block model network.

    Args:
        params: Model parameters

    Returns:
        GenList with the adjacency tensor, the edge-probability tensor and ground truth
    """
    n, m, L, K = params.n, params.m, params.L, params.K
    p_in, p_out = solve_block_probabilities(n, K, params.degree, params.out_in_ratio)
    B = block_connectivity(K, p_in, p_out)

    entropy = _root_entropy(params.seed)
    rng = _structure_rng(entropy)

    layer_types = round_robin_layer_types(L, m)
    if params.shared_memberships:
        shared = _balanced_memberships(n, K, rng)
        memberships = np.tile(shared, (m, 1))
    else:
        memberships = np.stack([_balanced_memberships(n, K, rng) for _ in range(m)])

    theta = np.empty((n, n, L))
    for layer, net_type in enumerate(layer_types):
        z = memberships[net_type]
        theta[:, :, layer] = B[np.ix_(z, z)]
        np.fill_diagonal(theta[:, :, layer], 0.0)

    tensor = sample_adjacency(theta, entropy)
    logger.info(
        f"Generated MMSBM tensor {tensor.shape} (p_in={p_in:.4f}, p_out={p_out:.4f}, "
        f"mean degree={tensor.sum() / (n * L):.2f})"
    )

    return GenList(
        tensor=tensor,
        theta=theta,
        truth=GroundTruth(layer_types=layer_types, memberships=memberships),
        block_matrix=B,
        metadata={'model': 'mmsbm', 'p_in': p_in, 'p_out': p_out, 'entropy': str(entropy)},
    )


def _sample_core(rank: int, m: int, cmax: float, distribution: CoreDistribution,
                 rng: np.random.Generator) -> np.ndarray:
    size = (rank, rank, m)
    if distribution is CoreDistribution.UNIFORM:
        core = rng.uniform(-cmax, cmax, size=size)
    else:
        core = stats.truncnorm.rvs(-cmax, cmax, size=size, random_state=rng)
    # Symmetric slices give symmetric layers of theta
    return (core + core.transpose(1, 0, 2)) / 2.0


def _degree_offset(theta: np.ndarray, target: float, link: LinkType) -> float:
    """Constant shift making the mean off-diagonal link value equal ``target``."""
    n = theta.shape[0]
    off_diagonal = ~np.eye(n, dtype=bool)
    values = theta[off_diagonal, :]

    def _gap(offset: float) -> float:
        return float(np.mean(link_value(values + offset, link))) - target

    lo, hi = -1.0, 1.0
    for _ in range(64):
        if _gap(lo) < 0:
            break
        lo *= 2.0
    for _ in range(64):
        if _gap(hi) > 0:
            break
        hi *= 2.0

    return optimize.brentq(_gap, lo, hi, xtol=1e-14)


def generate_mmlsm(params: MmlsmParams) -> GenList:
    """
    Generate a mixture multilayer latent space model network.

    Theta = (C x1 U x2 U x3 W) / scale_par, optionally shifted so the mean link
    probability is ``d / (n - 1)``.

    Args:
        params: Model parameters

    Returns:
        GenList with the adjacency tensor, theta and the latent ground truth
    """
    n, m, L, rank = params.n, params.m, params.L, params.rank
    link = LinkType.parse(params.kernel_fun)
    distribution = CoreDistribution.parse(params.int_type)

    target = None
    if params.d is not None:
        target = params.d / (n - 1)
        if not 0 < target < 1:
            raise InfeasibleParametersError(
                f"Average degree d={params.d} gives link mean {target:.4f} outside (0, 1)"
            )

    entropy = _root_entropy(params.seed)
    rng = _structure_rng(entropy)

    U = rng.normal(params.u_mean, 1.0, size=(n, rank))
    row_norms = np.linalg.norm(U, axis=1)
    U = U / np.maximum(row_norms, 1.0)[:, None]

    layer_types = round_robin_layer_types(L, m)
    W = np.zeros((L, m))
    W[np.arange(L), layer_types] = 1.0

    C = _sample_core(rank, m, params.cmax, distribution, rng)

    theta = multi_mode_multiply(C, [U, U, W]) / params.scale_par
    theta = (theta + theta.transpose(1, 0, 2)) / 2.0

    offset = 0.0
    if target is not None:
        offset = _degree_offset(theta, target, link)
        theta = theta + offset

    probabilities = link_value(theta, link)
    tensor = sample_adjacency(probabilities, entropy)
    logger.info(
        f"Generated MMLSM tensor {tensor.shape} ({link.value} link, offset={offset:.4f}, "
        f"density={tensor.sum() / (n * (n - 1) * L):.4f})"
    )

    return GenList(
        tensor=tensor,
        theta=theta,
        truth=GroundTruth(layer_types=layer_types, U=U, W=W, C=C),
        metadata={'model': 'mmlsm', 'offset': offset, 'entropy': str(entropy)},
    )
