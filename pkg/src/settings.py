"""
Settings
Default tuning constants and environment-driven runtime configuration.
"""

import os
import logging

from src.errors import ArgumentError

logger = logging.getLogger(__name__)

# Generation
DEFAULT_OUT_IN_RATIO = 0.4
DEFAULT_DEGREE_FRACTION = 0.25  # d = n / 4 when absent
DEFAULT_U_MEAN = 0.5
DEFAULT_CMAX = 1.0
DEFAULT_SCALE_PAR = 1.0

# TWIST / Tucker power iteration
DEFAULT_DELTA = 1000.0
DEFAULT_MAX_ITER = 25
DEFAULT_TOL = 1e-5

# Projected gradient descent
DEFAULT_ETA = 1e-4
DEFAULT_TMAX = 35
DEFAULT_SGMA = 1.0
DEFAULT_SAMPLE_SIZE = 5000
DEFAULT_PERTURB = 0.1
EXP_SATURATION = 700.0
PROB_CLIP = 1e-12

# Clustering
DEFAULT_KMEANS_RESTARTS = 20
DEFAULT_KMEANS_MAX_ITER = 300
DEFAULT_EPS = 0.05
DEFAULT_MIN_PTS = 5
NOISE_LABEL = -1
BRUTE_FORCE_MAX_K = 5

# Runtime
THREADS_ENV_VAR = 'MULTINET_THREADS'
DEFAULT_MAX_THREADS = 4


def get_max_workers() -> int:
    """
    Resolve the worker-thread cap.

    Reads ``MULTINET_THREADS``; falls back to ``min(4, cpu_count)``.
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == '':
        return max(1, min(DEFAULT_MAX_THREADS, os.cpu_count() or 1))

    try:
        value = int(raw)
    except ValueError:
        raise ArgumentError(f"{THREADS_ENV_VAR} must be a positive integer, got '{raw}'")

    if value < 1:
        raise ArgumentError(f"{THREADS_ENV_VAR} must be a positive integer, got {value}")

    logger.debug(f"Thread cap from {THREADS_ENV_VAR}: {value}")
    return value
