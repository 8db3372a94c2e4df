"""
Clustering
k-means and DBSCAN over embedding rows, plus misclustering evaluation against planted labels.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist
from tabulate import tabulate

from src.errors import ArgumentError
from src.settings import (
    BRUTE_FORCE_MAX_K,
    DEFAULT_EPS,
    DEFAULT_KMEANS_MAX_ITER,
    DEFAULT_KMEANS_RESTARTS,
    DEFAULT_MIN_PTS,
    NOISE_LABEL,
    get_max_workers,
)

logger = logging.getLogger(__name__)


class ItemType(Enum):
    NODE = "n"
    NETWORK = "N"

    @classmethod
    def parse(cls, value) -> 'ItemType':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            raise ArgumentError(f"Item type must be 'n' (nodes) or 'N' (networks), got '{value}'")

    @property
    def noun(self) -> str:
        return 'node' if self is ItemType.NODE else 'network'


@dataclass
class ClusterAssignment:
    """Cluster label per item; DBSCAN noise is -1."""
    labels: np.ndarray
    k: int
    item_type: ItemType = ItemType.NODE
    method: str = 'kmeans'
    objective: Optional[float] = None

    @property
    def n_noise(self) -> int:
        return int(np.sum(self.labels == NOISE_LABEL))

    def sizes(self) -> Dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}


def _as_points(embedding) -> np.ndarray:
    points = np.asarray(embedding, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[0] == 0:
        raise ArgumentError(f"Embedding must be a non-empty matrix, got shape {points.shape}")
    return points


def _normalize_rows(points: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(points, axis=1)
    norms[norms == 0] = 1.0
    return points / norms[:, None]


def _kmeans_plus_plus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n_samples = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n_samples)]
    closest = np.sum((points - centers[0]) ** 2, axis=1)

    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            index = rng.choice(n_samples, p=closest / total)
        else:
            index = rng.integers(n_samples)
        centers[c] = points[index]
        closest = np.minimum(closest, np.sum((points - centers[c]) ** 2, axis=1))

    return centers


def _update_centers(points: np.ndarray, labels: np.ndarray, distances: np.ndarray,
                    k: int) -> np.ndarray:
    centers = np.empty((k, points.shape[1]))
    own_distance = distances[np.arange(points.shape[0]), labels].copy()
    for j in range(k):
        members = labels == j
        if members.any():
            centers[j] = points[members].mean(axis=0)
        else:
            # Empty cluster: re-seed at the point farthest from its own centroid
            farthest = int(np.argmax(own_distance))
            centers[j] = points[farthest]
            own_distance[farthest] = -1.0
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray,
           max_iter: int) -> Tuple[np.ndarray, float, int]:
    k = centers.shape[0]
    distances = cdist(points, centers, 'sqeuclidean')
    labels = np.argmin(distances, axis=1)

    iteration = 0
    for iteration in range(1, max_iter + 1):
        centers = _update_centers(points, labels, distances, k)
        distances = cdist(points, centers, 'sqeuclidean')
        new_labels = np.argmin(distances, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    inertia = float(distances[np.arange(points.shape[0]), labels].sum())
    return labels, inertia, iteration


def community_cluster_km(embedding,
                         type: Union[str, ItemType] = ItemType.NODE,
                         cluster_number: int = 2,
                         seed: Optional[int] = None,
                         n_init: int = DEFAULT_KMEANS_RESTARTS,
                         normalize: bool = False,
                         max_iter: int = DEFAULT_KMEANS_MAX_ITER) -> ClusterAssignment:
    """
    k-means with k-means++ seeding and restarts.

    Args:
        embedding: Rows are the items to cluster
        type: 'n' for nodes, 'N' for networks (reporting only)
        cluster_number: Number of clusters
        seed: Root seed; each restart gets its own derived stream
        n_init: Number of restarts, best by within-cluster sum of squares
        normalize: L2-normalize rows first
        max_iter: Lloyd iteration cap per restart

    Returns:
        ClusterAssignment with the objective of the winning restart
    """
    item_type = ItemType.parse(type)
    points = _as_points(embedding)
    if not 1 <= cluster_number <= points.shape[0]:
        raise ArgumentError(
            f"cluster_number must lie in [1, {points.shape[0]}], got {cluster_number}"
        )
    if n_init < 1:
        raise ArgumentError(f"n_init must be >= 1, got {n_init}")
    if normalize:
        points = _normalize_rows(points)

    streams = np.random.SeedSequence(seed).spawn(n_init)

    def _restart(stream: np.random.SeedSequence) -> Tuple[np.ndarray, float, int]:
        rng = np.random.default_rng(stream)
        centers = _kmeans_plus_plus(points, cluster_number, rng)
        return _lloyd(points, centers, max_iter)

    with ThreadPoolExecutor(max_workers=get_max_workers()) as pool:
        runs = list(pool.map(_restart, streams))

    best_index = 0
    for index, (_, inertia, _) in enumerate(runs):
        if inertia < runs[best_index][1]:
            best_index = index
    labels, inertia, iterations = runs[best_index]

    logger.info(
        f"k-means on {points.shape[0]} {item_type.noun}s: k={cluster_number}, "
        f"objective={inertia:.6f} (restart {best_index}, {iterations} iterations)"
    )
    return ClusterAssignment(labels=labels.astype(int), k=cluster_number,
                             item_type=item_type, method='kmeans', objective=inertia)


def community_cluster_dbscan(embedding,
                             type: Union[str, ItemType] = ItemType.NODE,
                             eps_value: float = DEFAULT_EPS,
                             pts_value: int = DEFAULT_MIN_PTS) -> ClusterAssignment:
    """
    DBSCAN with Euclidean distance.

    Core points have at least ``pts_value`` neighbours within ``eps_value`` (self
    included). Clusters are connected components of core points, numbered by their
    lowest-index core point. A border point joins the cluster of its lowest-index
    core neighbour; everything else is noise (-1).
    """
    item_type = ItemType.parse(type)
    if not eps_value > 0:
        raise ArgumentError(f"eps_value must be positive, got {eps_value}")
    if pts_value < 1:
        raise ArgumentError(f"pts_value must be >= 1, got {pts_value}")

    points = _as_points(embedding)
    neighbors = cdist(points, points) <= eps_value
    is_core = neighbors.sum(axis=1) >= pts_value
    core_index = np.flatnonzero(is_core)

    labels = np.full(points.shape[0], NOISE_LABEL, dtype=int)
    k = 0
    if core_index.size:
        graph = csr_matrix(neighbors[np.ix_(core_index, core_index)])
        _, components = connected_components(graph, directed=False)

        renumber: Dict[int, int] = {}
        for component in components:
            if component not in renumber:
                renumber[component] = len(renumber)
        labels[core_index] = [renumber[c] for c in components]
        k = len(renumber)

        for i in np.flatnonzero(~is_core):
            core_neighbors = core_index[neighbors[i, core_index]]
            if core_neighbors.size:
                labels[i] = labels[core_neighbors[0]]

    result = ClusterAssignment(labels=labels, k=k, item_type=item_type, method='dbscan')
    logger.info(
        f"DBSCAN on {points.shape[0]} {item_type.noun}s: {k} clusters, {result.n_noise} noise points"
    )
    return result


def confusion_matrix(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Square contingency table of non-noise predictions against truth labels."""
    valid = pred != NOISE_LABEL
    pred_classes = np.unique(pred[valid])
    truth_classes = np.unique(truth)
    size = max(len(pred_classes), len(truth_classes), 1)

    table = np.zeros((size, size), dtype=int)
    pred_pos = {c: i for i, c in enumerate(pred_classes)}
    truth_pos = {c: j for j, c in enumerate(truth_classes)}
    for p, t in zip(pred[valid], truth[valid]):
        table[pred_pos[p], truth_pos[t]] += 1
    return table


def _matched_brute_force(table: np.ndarray) -> int:
    size = table.shape[0]
    rows = np.arange(size)
    return max(int(table[rows, list(perm)].sum()) for perm in itertools.permutations(range(size)))


def _matched_hungarian(table: np.ndarray) -> int:
    rows, cols = linear_sum_assignment(table, maximize=True)
    return int(table[rows, cols].sum())


def misclustering_rate(pred: Union[ClusterAssignment, Sequence[int]],
                       truth: Sequence[int]) -> float:
    """
    Minimum fraction of mismatched labels over all label permutations.

    Noise points always count as errors.
    """
    pred_labels = pred.labels if isinstance(pred, ClusterAssignment) else pred
    pred_labels = np.asarray(pred_labels, dtype=int).ravel()
    truth_labels = np.asarray(truth, dtype=int).ravel()
    if pred_labels.size != truth_labels.size:
        raise ArgumentError(
            f"Label length mismatch: {pred_labels.size} predicted vs {truth_labels.size} truth"
        )
    if pred_labels.size == 0:
        raise ArgumentError("Cannot score empty label sequences")

    table = confusion_matrix(pred_labels, truth_labels)
    if table.shape[0] <= BRUTE_FORCE_MAX_K:
        matched = _matched_brute_force(table)
    else:
        matched = _matched_hungarian(table)
    return 1.0 - matched / pred_labels.size


def get_cluster_report(assignment: ClusterAssignment) -> str:
    """Plain-text table of cluster sizes."""
    rows = []
    for label, count in assignment.sizes().items():
        name = 'noise' if label == NOISE_LABEL else str(label)
        rows.append([name, count])

    lines = [
        f"=== {assignment.method} clustering of {assignment.labels.size} "
        f"{assignment.item_type.noun}s ===",
        tabulate(rows, headers=['cluster', 'size'], tablefmt='simple'),
    ]
    if assignment.objective is not None:
        lines.append(f"Within-cluster sum of squares: {assignment.objective:.6f}")
    return '\n'.join(lines)
