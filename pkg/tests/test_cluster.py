"""
Tests for k-means, DBSCAN and misclustering evaluation
"""

import os
import sys
from collections import deque

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cluster import (
    ClusterAssignment,
    ItemType,
    _matched_brute_force,
    _matched_hungarian,
    _update_centers,
    community_cluster_dbscan,
    community_cluster_km,
    confusion_matrix,
    get_cluster_report,
    misclustering_rate,
)
from src.errors import ArgumentError


def _dbscan_by_definition(points, eps, min_pts):
    """Expand clusters from each unvisited core point in index order."""
    n = len(points)
    distances = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    neighbors = [np.flatnonzero(distances[i] <= eps) for i in range(n)]
    core = [len(neighbors[i]) >= min_pts for i in range(n)]

    labels = [-1] * n
    cluster = 0
    for start in range(n):
        if not core[start] or labels[start] != -1:
            continue
        labels[start] = cluster
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in neighbors[i]:
                if core[j] and labels[j] == -1:
                    labels[j] = cluster
                    queue.append(j)
        cluster += 1

    for i in range(n):
        if not core[i]:
            core_neighbors = [j for j in neighbors[i] if core[j]]
            if core_neighbors:
                labels[i] = labels[min(core_neighbors)]
    return np.array(labels)


def _same_partition(a, b):
    if not np.array_equal(a == -1, b == -1):
        return False
    mapping = {}
    for x, y in zip(a, b):
        if mapping.setdefault(x, y) != y:
            return False
    return len(set(mapping.values())) == len(mapping)


class TestKMeans:
    """Tests for community_cluster_km."""

    def test_single_cluster(self):
        """Test that k=1 assigns every point to one cluster."""
        points = np.random.default_rng(0).normal(size=(20, 3))
        result = community_cluster_km(points, cluster_number=1, seed=0)
        assert (result.labels == 0).all()
        total = ((points - points.mean(axis=0)) ** 2).sum()
        assert result.objective == pytest.approx(total)

    def test_separated_clouds(self):
        """Test k-means on well separated point clouds."""
        rng = np.random.default_rng(1)
        points = np.vstack([rng.normal(size=(15, 2)), rng.normal(size=(15, 2)) + 100.0])
        result = community_cluster_km(points, cluster_number=2, seed=1)
        assert misclustering_rate(result, [0] * 15 + [1] * 15) == 0

    def test_line_partition_matches_exhaustive_optimum(self):
        """Test the objective against an exhaustive search over 1-D partitions."""
        points = np.array([0, 1, 2, 10, 11, 12, 20, 21, 22, 30, 31, 32], dtype=float)
        result = community_cluster_km(points, cluster_number=4, seed=2)
        # Best contiguous split: four triples, each contributing 2
        assert result.objective == pytest.approx(8.0)
        assert result.sizes() == {0: 3, 1: 3, 2: 3, 3: 3}

    def test_seeded_runs_repeat(self):
        """Test that the same seed gives the same labels."""
        points = np.random.default_rng(3).normal(size=(40, 2))
        first = community_cluster_km(points, cluster_number=3, seed=9)
        second = community_cluster_km(points, cluster_number=3, seed=9)
        np.testing.assert_array_equal(first.labels, second.labels)
        assert first.objective == second.objective

    def test_normalize_uses_directions(self):
        """Test that row normalization clusters by direction."""
        points = np.array([[1.0, 0.0], [10.0, 0.0], [0.0, 1.0], [0.0, 10.0]])
        result = community_cluster_km(points, cluster_number=2, seed=0, normalize=True)
        assert misclustering_rate(result, [0, 0, 1, 1]) == 0
        assert result.objective == pytest.approx(0.0)

    def test_network_items(self):
        """Test clustering with network item type."""
        result = community_cluster_km(np.eye(3), type='N', cluster_number=3, seed=0)
        assert result.item_type is ItemType.NETWORK

    def test_invalid_cluster_number(self):
        """Test that an invalid cluster count is rejected."""
        with pytest.raises(ArgumentError):
            community_cluster_km(np.zeros((3, 2)), cluster_number=4)
        with pytest.raises(ArgumentError):
            community_cluster_km(np.zeros((3, 2)), cluster_number=0)

    def test_invalid_type(self):
        """Test that an unknown item type is rejected."""
        with pytest.raises(ArgumentError):
            community_cluster_km(np.zeros((3, 2)), type='x')

    def test_empty_cluster_reseeded_at_farthest_point(self):
        """Test that an empty cluster restarts at the farthest point."""
        points = np.array([[0.0], [1.0], [5.0]])
        labels = np.zeros(3, dtype=int)
        distances = np.array([[1.0, 9.0], [0.0, 9.0], [16.0, 9.0]])
        centers = _update_centers(points, labels, distances, 2)
        assert centers[0, 0] == pytest.approx(2.0)
        assert centers[1, 0] == 5.0


class TestDbscan:
    """Tests for community_cluster_dbscan."""

    def test_identical_points(self):
        """Test DBSCAN on coincident points."""
        result = community_cluster_dbscan(np.ones((6, 2)), eps_value=0.1, pts_value=6)
        assert (result.labels == 0).all()
        assert result.k == 1
        assert result.n_noise == 0

    def test_isolated_points_are_noise(self):
        """Test that isolated points are labelled noise."""
        points = np.array([[0.0, 0.0], [0.01, 0.0], [0.02, 0.0], [5.0, 5.0]])
        result = community_cluster_dbscan(points, eps_value=0.05, pts_value=3)
        np.testing.assert_array_equal(result.labels, [0, 0, 0, -1])

    def test_clusters_numbered_by_first_core_point(self):
        """Test that cluster ids follow the first core point."""
        points = np.array([[10.0], [10.01], [10.02], [0.0], [0.01], [0.02]])
        result = community_cluster_dbscan(points, eps_value=0.05, pts_value=2)
        np.testing.assert_array_equal(result.labels, [0, 0, 0, 1, 1, 1])

    def test_matches_definition(self):
        """Test DBSCAN against a definition-level implementation."""
        rng = np.random.default_rng(4)
        for _ in range(100):
            centers = rng.uniform(0, 1, size=(3, 2))
            points = centers[rng.integers(0, 3, size=40)] + rng.normal(scale=0.08, size=(40, 2))
            eps = float(rng.uniform(0.03, 0.15))
            min_pts = int(rng.integers(2, 6))
            result = community_cluster_dbscan(points, eps_value=eps, pts_value=min_pts)
            expected = _dbscan_by_definition(points, eps, min_pts)
            assert _same_partition(result.labels, expected)

    def test_invalid_parameters(self):
        """Test that invalid eps or min points are rejected."""
        with pytest.raises(ArgumentError):
            community_cluster_dbscan(np.zeros((3, 2)), eps_value=0.0)
        with pytest.raises(ArgumentError):
            community_cluster_dbscan(np.zeros((3, 2)), pts_value=0)


class TestMisclustering:
    """Tests for misclustering_rate."""

    def test_permuted_labels(self):
        """Test that permuted labels score zero."""
        assert misclustering_rate([1, 1, 0, 0, 2], [0, 0, 1, 1, 2]) == 0.0

    def test_one_error(self):
        """Test a single mislabelled item."""
        assert misclustering_rate([0, 0, 1, 1], [0, 0, 1, 0]) == pytest.approx(0.25)

    def test_noise_counts_as_error(self):
        """Test that noise labels count as errors."""
        assert misclustering_rate([0, 0, -1, 1], [0, 0, 1, 1]) == pytest.approx(0.25)

    def test_more_predicted_than_true_clusters(self):
        """Test more predicted clusters than true ones."""
        assert misclustering_rate([0, 1, 2, 3], [0, 0, 1, 1]) == pytest.approx(0.5)

    def test_hungarian_matches_brute_force(self):
        """Test the assignment solver against all permutations."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            k = int(rng.integers(1, 6))
            pred = rng.integers(0, k, size=30)
            truth = rng.integers(0, k, size=30)
            table = confusion_matrix(pred, truth)
            assert _matched_hungarian(table) == _matched_brute_force(table)

    def test_large_k_uses_assignment(self):
        """Test misclustering with many clusters."""
        truth = np.repeat(np.arange(8), 3)
        pred = (truth + 3) % 8
        assert misclustering_rate(pred, truth) == 0.0

    def test_length_mismatch(self):
        """Test that label sequences of different length are rejected."""
        with pytest.raises(ArgumentError):
            misclustering_rate([0, 1], [0, 1, 1])


class TestReport:
    """Tests for the cluster report."""

    def test_report_lists_noise(self):
        """Test that the report lists cluster sizes and noise."""
        assignment = ClusterAssignment(labels=np.array([0, 0, -1]), k=1, method='dbscan')
        report = get_cluster_report(assignment)
        assert 'dbscan clustering of 3 nodes' in report
        assert 'noise' in report
        assert assignment.sizes() == {-1: 1, 0: 2}
