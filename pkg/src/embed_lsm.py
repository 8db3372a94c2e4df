"""
Latent Space Model Fitting
Projected gradient descent for the mixture multilayer latent space model, where the
parameter tensor is ``Theta = C x1 U x2 U x3 W`` and edges follow a logit, probit or
poisson link of ``Theta / sgma``.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from src.baselines import EmbeddingType, spec_embedding, sum_adjacency_embedding
from src.errors import ArgumentError, NumericalError
from src.generate import GenList
from src.links import LinkType, link_derivative, link_value
from src.settings import (
    DEFAULT_CMAX,
    DEFAULT_ETA,
    DEFAULT_PERTURB,
    DEFAULT_SAMPLE_SIZE,
    DEFAULT_SGMA,
    DEFAULT_TMAX,
    EXP_SATURATION,
    PROB_CLIP,
)
from src.tensor_core import as_tensor3, multi_mode_multiply, unfold

logger = logging.getLogger(__name__)

__all__ = [
    'InitType', 'SamplingMode', 'LsmInit', 'GdConfig', 'LsmResult', 'link_value',
    'compose_theta', 'neg_log_likelihood', 'theta_gradient', 'lsm_gradient',
    'stochastic_lsm_gradient', 'project', 'initialization_lsm', 'projected_gd',
]


class InitType(Enum):
    SPEC = "spec"
    RAND = "rand"
    WARM = "warm"


class SamplingMode(Enum):
    RAND = "rand"
    NON = "Non"

    @classmethod
    def parse(cls, value) -> 'SamplingMode':
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ArgumentError(f"Unknown sampling mode '{value}', expected rand or Non")


@dataclass
class LsmInit:
    """Starting point for projected gradient descent."""
    tensor: np.ndarray
    U0: np.ndarray
    W0: np.ndarray
    C0: np.ndarray
    deltas: Tuple[float, float, float]
    rank: int
    M: int

    def __post_init__(self):
        n, _, L = self.tensor.shape
        if self.U0.shape != (n, self.rank):
            raise ArgumentError(f"U0 has shape {self.U0.shape}, expected {(n, self.rank)}")
        if self.W0.shape != (L, self.M):
            raise ArgumentError(f"W0 has shape {self.W0.shape}, expected {(L, self.M)}")
        if self.C0.shape != (self.rank, self.rank, self.M):
            raise ArgumentError(
                f"C0 has shape {self.C0.shape}, expected {(self.rank, self.rank, self.M)}"
            )
        if min(self.deltas) <= 0:
            raise ArgumentError(f"Tuning parameters must be positive, got {self.deltas}")


@dataclass(frozen=True)
class GdConfig:
    """Projected gradient descent settings. ``Cmax=None`` falls back to the init's delta3."""
    Cmax: Optional[float] = None
    eta_outer: float = DEFAULT_ETA
    tmax_outer: int = DEFAULT_TMAX
    p_type: Union[str, LinkType] = LinkType.LOGIT
    rd: Union[str, SamplingMode] = SamplingMode.NON
    show: bool = True
    sgma: float = DEFAULT_SGMA
    sample_size: int = DEFAULT_SAMPLE_SIZE
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'p_type', LinkType.parse(self.p_type))
        object.__setattr__(self, 'rd', SamplingMode.parse(self.rd))
        if self.Cmax is not None and not self.Cmax > 0:
            raise ArgumentError(f"Cmax must be positive, got {self.Cmax}")
        if self.eta_outer < 0:
            raise ArgumentError(f"eta_outer must be non-negative, got {self.eta_outer}")
        if self.tmax_outer < 1:
            raise ArgumentError(f"tmax_outer must be >= 1, got {self.tmax_outer}")
        if not self.sgma > 0:
            raise ArgumentError(f"sgma must be positive, got {self.sgma}")
        if self.rd is SamplingMode.RAND and self.sample_size < 1:
            raise ArgumentError(f"sample_size must be >= 1, got {self.sample_size}")


@dataclass
class LsmResult:
    """Fitted node embedding U, layer embedding W and core C."""
    U: np.ndarray
    W: np.ndarray
    C: np.ndarray
    loss_trace: List[float] = field(default_factory=list)
    iterations: int = 0


def compose_theta(U: np.ndarray, W: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``Theta = C x1 U x2 U x3 W``."""
    return multi_mode_multiply(C, [U, U, W])


def _off_diagonal_mask(n: int) -> np.ndarray:
    return ~np.eye(n, dtype=bool)


def _check_counts(tensor: np.ndarray) -> None:
    if (tensor < 0).any():
        raise ArgumentError("Poisson likelihood requires non-negative counts")


def _entry_loss(a: np.ndarray, theta: np.ndarray, link: LinkType, sgma: float) -> np.ndarray:
    if link is LinkType.POISSON:
        x = np.clip(theta / sgma, -EXP_SATURATION, EXP_SATURATION)
        return np.exp(x) - a * x
    p = np.clip(link_value(theta, link, sgma), PROB_CLIP, 1.0 - PROB_CLIP)
    return -(a * np.log(p) + (1.0 - a) * np.log(1.0 - p))


def _entry_gradient(a: np.ndarray, theta: np.ndarray, link: LinkType, sgma: float) -> np.ndarray:
    """Derivative of the per-entry loss with respect to theta."""
    if link is LinkType.POISSON:
        x = np.clip(theta / sgma, -EXP_SATURATION, EXP_SATURATION)
        return (np.exp(x) - a) / sgma
    p = np.clip(link_value(theta, link, sgma), PROB_CLIP, 1.0 - PROB_CLIP)
    dp = link_derivative(theta, link, sgma)
    return -(a / p - (1.0 - a) / (1.0 - p)) * dp


def neg_log_likelihood(tensor: np.ndarray,
                       theta: np.ndarray,
                       p_type: Union[str, LinkType] = LinkType.LOGIT,
                       sgma: float = DEFAULT_SGMA) -> float:
    """
    Negative log-likelihood over off-diagonal entries.

    Bernoulli links clip probabilities to ``[1e-12, 1 - 1e-12]``; poisson uses
    ``sum(lambda - a log lambda)``.
    """
    tensor = as_tensor3(tensor)
    theta = as_tensor3(theta)
    if tensor.shape != theta.shape:
        raise ArgumentError(f"Tensor dims {tensor.shape} do not match theta dims {theta.shape}")
    link = LinkType.parse(p_type)
    if link is LinkType.POISSON:
        _check_counts(tensor)

    mask = _off_diagonal_mask(tensor.shape[0])
    return float(np.sum(_entry_loss(tensor[mask, :], theta[mask, :], link, sgma)))


def theta_gradient(tensor: np.ndarray,
                   theta: np.ndarray,
                   p_type: Union[str, LinkType] = LinkType.LOGIT,
                   sgma: float = DEFAULT_SGMA) -> np.ndarray:
    """Gradient of :func:`neg_log_likelihood` with respect to theta (zero diagonal)."""
    link = LinkType.parse(p_type)
    grad = _entry_gradient(tensor, theta, link, sgma)
    grad[np.arange(tensor.shape[0]), np.arange(tensor.shape[0]), :] = 0.0
    return grad


def _factor_gradients(G: np.ndarray, U: np.ndarray, W: np.ndarray,
                      C: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Chain rule from dL/dTheta to (dL/dU, dL/dW, dL/dC); U fills two slots."""
    grad_C = multi_mode_multiply(G, [U, U, W], transpose=True)

    slot1 = unfold(multi_mode_multiply(G, [None, U, W], transpose=True), 1) @ unfold(C, 1).T
    slot2 = unfold(multi_mode_multiply(G, [U, None, W], transpose=True), 2) @ unfold(C, 2).T
    grad_U = slot1 + slot2

    grad_W = unfold(multi_mode_multiply(G, [U, U, None], transpose=True), 3) @ unfold(C, 3).T
    return grad_U, grad_W, grad_C


def lsm_gradient(tensor: np.ndarray, U: np.ndarray, W: np.ndarray, C: np.ndarray,
                 p_type: Union[str, LinkType] = LinkType.LOGIT,
                 sgma: float = DEFAULT_SGMA) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-sample gradient of the loss with respect to (U, W, C)."""
    theta = compose_theta(U, W, C)
    G = theta_gradient(tensor, theta, p_type, sgma)
    return _factor_gradients(G, U, W, C)


def stochastic_lsm_gradient(tensor: np.ndarray, U: np.ndarray, W: np.ndarray, C: np.ndarray,
                            p_type: Union[str, LinkType],
                            sgma: float,
                            sample_size: int,
                            rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Unbiased gradient estimate from ``sample_size`` off-diagonal entries.

    Entries are drawn uniformly with replacement and reweighted by
    ``(#off-diagonal entries) / sample_size``.
    """
    link = LinkType.parse(p_type)
    n, _, L = tensor.shape

    rows = rng.integers(0, n, size=sample_size)
    cols = rng.integers(0, n - 1, size=sample_size)
    cols = cols + (cols >= rows)
    layers = rng.integers(0, L, size=sample_size)

    theta = np.einsum('abc,sa,sb,sc->s', C, U[rows], U[cols], W[layers], optimize=True)
    weight = n * (n - 1) * L / sample_size
    values = _entry_gradient(tensor[rows, cols, layers], theta, link, sgma) * weight

    G = np.zeros(tensor.shape)
    np.add.at(G, (rows, cols, layers), values)
    return _factor_gradients(G, U, W, C)


def _clip_rows(matrix: np.ndarray, bound: float) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1)
    over = norms > bound
    if not over.any():
        return matrix
    clipped = matrix.copy()
    clipped[over] *= (bound / norms[over])[:, None]
    return clipped


def project(U: np.ndarray, W: np.ndarray, C: np.ndarray,
            deltas: Tuple[float, float, float],
            cmax: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Clip C entrywise to [-cmax, cmax], then bound row norms of U by delta1 and W by delta2."""
    C = np.clip(C, -cmax, cmax)
    U = _clip_rows(U, deltas[0])
    W = _clip_rows(W, deltas[1])
    return U, W, C


def _row_bound(matrix: np.ndarray) -> float:
    largest = float(np.max(np.linalg.norm(matrix, axis=1))) if matrix.size else 0.0
    # Zero factors (rand init with perturb=0) still need a positive bound
    return 2.0 * largest if largest > 0 else 1.0


def _centred_layer_sum(tensor: np.ndarray) -> np.ndarray:
    """Layer-summed adjacency with its off-diagonal mean removed; diagonal stays zero."""
    summed = tensor.sum(axis=2)
    mask = _off_diagonal_mask(tensor.shape[0])
    return np.where(mask, summed - summed[mask].mean(), 0.0)


def _least_squares_core(tensor: np.ndarray, U0: np.ndarray, W0: np.ndarray) -> np.ndarray:
    mask = _off_diagonal_mask(tensor.shape[0])
    centred = tensor - tensor[mask, :].mean()
    U_pinv = np.linalg.pinv(U0)
    return multi_mode_multiply(centred, [U_pinv, U_pinv, np.linalg.pinv(W0)])


def initialization_lsm(gen_list: Union[GenList, np.ndarray],
                       n: int,
                       rank: int,
                       M: int,
                       perturb: float = DEFAULT_PERTURB,
                       int_type: Union[str, InitType] = InitType.SPEC,
                       seed: Optional[int] = None) -> LsmInit:
    """
    Initialize U and W for projected gradient descent.

    Args:
        gen_list: Generator output, or a bare adjacency tensor (no warm start)
        n: Number of nodes
        rank: Columns of U
        M: Number of network types (columns of W)
        perturb: Upper bound of the Uniform(0, perturb) noise
        int_type: 'spec', 'rand' or 'warm'
        seed: RNG seed for the uniform draws

    Returns:
        LsmInit with U0, W0, C0 and tuning parameters (delta1, delta2, delta3)
    """
    if isinstance(gen_list, GenList):
        tensor, truth = as_tensor3(gen_list.tensor), gen_list.truth
    else:
        tensor, truth = as_tensor3(gen_list), None

    try:
        init_type = InitType(str(getattr(int_type, 'value', int_type)).lower())
    except ValueError:
        raise ArgumentError(f"Unknown int_type '{int_type}', expected spec, rand or warm")
    if perturb < 0:
        raise ArgumentError(f"perturb must be non-negative, got {perturb}")
    if tensor.shape[0] != n or tensor.shape[1] != n:
        raise ArgumentError(f"Tensor dims {tensor.shape} do not match n={n}")
    L = tensor.shape[2]
    if not 1 <= rank <= n or not 1 <= M <= L:
        raise ArgumentError(f"Need 1 <= rank <= {n} and 1 <= M <= {L}, got rank={rank}, M={M}")

    rng = np.random.default_rng(seed)
    delta3 = DEFAULT_CMAX
    C0 = None

    if init_type is InitType.SPEC:
        U0 = np.sqrt(n) * sum_adjacency_embedding(_centred_layer_sum(tensor)[:, :, None], rank)
        W0 = np.sqrt(L) * spec_embedding(tensor, M, EmbeddingType.LAYER)
    elif init_type is InitType.RAND:
        U0 = rng.uniform(0.0, perturb, size=(n, rank))
        W0 = rng.uniform(0.0, perturb, size=(L, M))
    else:
        if truth is None or truth.U is None or truth.W is None:
            raise ArgumentError("Warm initialization needs latent ground truth (U, W) in gen_list")
        if truth.U.shape != (n, rank) or truth.W.shape != (L, M):
            raise ArgumentError(
                f"Ground truth shapes U{truth.U.shape}, W{truth.W.shape} do not match "
                f"rank={rank}, M={M}"
            )
        U0 = truth.U + rng.uniform(0.0, perturb, size=(n, rank))
        W0 = truth.W + rng.uniform(0.0, perturb, size=(L, M))
        if truth.C is not None:
            C0 = np.array(truth.C, dtype=float)
            delta3 = float(np.max(np.abs(C0))) or DEFAULT_CMAX

    if C0 is None:
        C0 = np.clip(_least_squares_core(tensor, U0, W0), -delta3, delta3)

    deltas = (_row_bound(U0), _row_bound(W0), delta3)
    logger.info(f"LSM {init_type.value} initialization: deltas={tuple(round(d, 4) for d in deltas)}")
    return LsmInit(tensor=tensor, U0=U0, W0=W0, C0=C0, deltas=deltas, rank=rank, M=M)


def projected_gd(init: LsmInit, cfg: GdConfig) -> LsmResult:
    """
    Projected gradient descent with simultaneous block updates of U, W and C.

    Args:
        init: Output of :func:`initialization_lsm`
        cfg: Step size, iteration count, link and sampling settings

    Returns:
        LsmResult with the final factors and the full-sample loss before and after
        every iteration
    """
    tensor = init.tensor
    link = cfg.p_type
    cmax = cfg.Cmax if cfg.Cmax is not None else init.deltas[2]
    rng = np.random.default_rng(cfg.seed)

    U, W, C = init.U0.copy(), init.W0.copy(), init.C0.copy()
    loss = neg_log_likelihood(tensor, compose_theta(U, W, C), link, cfg.sgma)
    loss_trace = [loss]

    for iteration in range(1, cfg.tmax_outer + 1):
        if cfg.rd is SamplingMode.RAND:
            grad_U, grad_W, grad_C = stochastic_lsm_gradient(
                tensor, U, W, C, link, cfg.sgma, cfg.sample_size, rng
            )
        else:
            grad_U, grad_W, grad_C = lsm_gradient(tensor, U, W, C, link, cfg.sgma)

        if not all(np.isfinite(g).all() for g in (grad_U, grad_W, grad_C)):
            raise NumericalError("Non-finite gradient in projected gradient descent", iteration)

        U = U - cfg.eta_outer * grad_U
        W = W - cfg.eta_outer * grad_W
        C = C - cfg.eta_outer * grad_C
        U, W, C = project(U, W, C, init.deltas, cmax)

        loss = neg_log_likelihood(tensor, compose_theta(U, W, C), link, cfg.sgma)
        if not np.isfinite(loss):
            raise NumericalError("Non-finite loss in projected gradient descent", iteration)
        loss_trace.append(loss)

        if cfg.show:
            logger.info(f"iter={iteration} loss={loss:.6f}")

    return LsmResult(U=U, W=W, C=C, loss_trace=loss_trace, iterations=cfg.tmax_outer)
