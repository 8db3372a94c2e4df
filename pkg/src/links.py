"""
Link Functions
Maps from the parameter tensor to edge probabilities (logit, probit) or intensities (poisson).
"""

from enum import Enum
from typing import Union

import numpy as np
from scipy import special, stats

from src.errors import ArgumentError
from src.settings import EXP_SATURATION


class LinkType(Enum):
    LOGIT = "logit"
    PROBIT = "probit"
    POISSON = "poisson"

    @classmethod
    def parse(cls, value: Union[str, 'LinkType']) -> 'LinkType':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ', '.join(m.value for m in cls)
            raise ArgumentError(f"Unknown link '{value}', expected one of: {choices}")


def _scaled(theta, sgma: float) -> np.ndarray:
    if not sgma > 0:
        raise ArgumentError(f"Link scale sgma must be positive, got {sgma}")
    return np.asarray(theta, dtype=float) / sgma


def link_value(theta, p_type: Union[str, LinkType] = LinkType.LOGIT, sgma: float = 1.0):
    """
    Evaluate the link at ``theta / sgma``.

    logit -> 1 / (1 + exp(-x)); probit -> Phi(x); poisson -> exp(x), the exponent
    saturated at +/-700.
    """
    link = LinkType.parse(p_type)
    x = _scaled(theta, sgma)

    if link is LinkType.LOGIT:
        value = special.expit(x)
    elif link is LinkType.PROBIT:
        value = special.ndtr(x)
    else:
        value = np.exp(np.clip(x, -EXP_SATURATION, EXP_SATURATION))

    return float(value) if np.ndim(value) == 0 else value


def link_derivative(theta, p_type: Union[str, LinkType] = LinkType.LOGIT, sgma: float = 1.0):
    """Derivative of :func:`link_value` with respect to ``theta``."""
    link = LinkType.parse(p_type)
    x = _scaled(theta, sgma)

    if link is LinkType.LOGIT:
        p = special.expit(x)
        value = p * (1.0 - p) / sgma
    elif link is LinkType.PROBIT:
        value = stats.norm.pdf(x) / sgma
    else:
        clipped = np.clip(x, -EXP_SATURATION, EXP_SATURATION)
        value = np.exp(clipped) / sgma

    return float(value) if np.ndim(value) == 0 else value
