"""
Embedding Plots
Scatter plots of embedding eigenvectors written as deterministic SVG files.

Eigenvectors are named 1-based as in "the second eigenvector", which is 0-based
column 1 of the embedding matrix.
"""

import io
import itertools
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.data_loader import atomic_write_text, embedding_frame  # noqa: E402
from src.errors import ArgumentError  # noqa: E402
from src.settings import NOISE_LABEL  # noqa: E402

logger = logging.getLogger(__name__)

PALETTE = [
    '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd',
    '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22', '#17becf',
]
NOISE_COLOR = '#b0b0b0'
DEFAULT_COLOR = '#1f77b4'
PANEL_SIZE = 3.5
SVG_HASH_SALT = 'multinet'


def plotted_columns(paxis: int) -> List[int]:
    """0-based columns shown for ``paxis`` eigenvectors, starting at the second."""
    if paxis < 2:
        raise ArgumentError(f"paxis must be >= 2, got {paxis}")
    return list(range(1, paxis + 1))


def panel_pairs(paxis: int) -> List[Tuple[int, int]]:
    """Column pairs, one per panel."""
    return list(itertools.combinations(plotted_columns(paxis), 2))


def _colors(labels: Optional[np.ndarray], n_items: int) -> List[str]:
    if labels is None:
        return [DEFAULT_COLOR] * n_items
    classes = sorted(int(v) for v in np.unique(labels) if v != NOISE_LABEL)
    index = {c: i for i, c in enumerate(classes)}
    return [NOISE_COLOR if v == NOISE_LABEL else PALETTE[index[int(v)] % len(PALETTE)]
            for v in labels]


def embedding_network(embedding: np.ndarray,
                      output_path: Path,
                      paxis: int = 2,
                      labels: Optional[np.ndarray] = None,
                      title: Optional[str] = None) -> int:
    """
    Plot eigenvectors 2..(paxis+1) pairwise.

    paxis=2 gives a single panel of eigenvector 2 (x) against eigenvector 3 (y). The
    plotted columns are also written as CSV next to the SVG.

    Args:
        embedding: Items x dims matrix
        output_path: SVG destination
        paxis: Number of eigenvectors to use
        labels: Optional cluster label per item for colouring
        title: Figure title

    Returns:
        Number of panels drawn
    """
    embedding = np.atleast_2d(np.asarray(embedding, dtype=float))
    columns = plotted_columns(paxis)
    required = columns[-1] + 1
    if embedding.shape[1] < required:
        raise ArgumentError(
            f"paxis={paxis} needs at least {required} embedding columns, got {embedding.shape[1]}"
        )
    if labels is not None and len(labels) != embedding.shape[0]:
        raise ArgumentError(
            f"Got {len(labels)} labels for {embedding.shape[0]} embedding rows"
        )

    pairs = panel_pairs(paxis)
    n_cols = min(3, len(pairs))
    n_rows = -(-len(pairs) // n_cols)
    colors = _colors(labels, embedding.shape[0])

    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none',
                         'axes.unicode_minus': False}):
        fig, axes = plt.subplots(n_rows, n_cols,
                                 figsize=(PANEL_SIZE * n_cols, PANEL_SIZE * n_rows),
                                 squeeze=False)
        for ax, (x_col, y_col) in zip(axes.ravel(), pairs):
            ax.scatter(embedding[:, x_col], embedding[:, y_col], c=colors, s=18,
                       edgecolors='k', linewidths=0.3)
            ax.set_xlabel(f"eigenvector {x_col + 1}")
            ax.set_ylabel(f"eigenvector {y_col + 1}")
            ax.grid(True, linestyle='--', alpha=0.3)
        for ax in axes.ravel()[len(pairs):]:
            ax.set_visible(False)
        if title:
            fig.suptitle(title)
        fig.tight_layout()

        buffer = io.StringIO()
        fig.savefig(buffer, format='svg', metadata={'Date': None})
        plt.close(fig)

    output_path = Path(output_path)
    atomic_write_text(output_path, buffer.getvalue())

    plotted = embedding_frame(embedding[:, columns])
    plotted.columns = [f"dim{c}" for c in columns]
    atomic_write_text(output_path.with_suffix('.csv'), plotted.to_csv(index=False, lineterminator='\n'))

    logger.info(f"Wrote {len(pairs)}-panel embedding plot to {output_path}")
    return len(pairs)
