"""
Tests for run manifests
"""

import json
import os
import sys
from pathlib import Path

import pytest

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src import __version__
from src.errors import TensorIOError, TensorParseError
from src.manifest import RunManifest, load_manifest, manifest_path


@pytest.fixture
def manifest():
    return RunManifest(
        subcommand='generate mmsbm',
        params={'n': 30, 'm': 2, 'seed': 4},
        argv=['generate', 'mmsbm', '--n', '30', '--m', '2', '--seed', '4'],
        seed=4,
        outputs=['net.tns'],
        wall_clock_seconds=0.25,
    )


class TestManifestPath:
    """Tests for manifest_path."""

    def test_replaces_suffix(self):
        """Test that the output suffix is replaced."""
        assert manifest_path(Path('runs/net.tns')) == Path('runs/net.manifest.json')
        assert manifest_path(Path('plot.svg')) == Path('plot.manifest.json')

    def test_prefix_without_suffix(self):
        """Test that bare prefixes get the suffix appended."""
        assert manifest_path(Path('out/twist')) == Path('out/twist.manifest.json')


class TestRunManifest:
    """Tests for writing and loading manifests."""

    def test_write_sorted_json(self, tmp_path, manifest):
        """Test the JSON written for a manifest."""
        path = manifest.write(tmp_path / 'net.manifest.json')
        data = json.loads(path.read_text())
        assert list(data) == sorted(data)
        assert data['version'] == __version__
        assert data['seed'] == 4
        assert path.read_text().endswith('\n')

    def test_load_round_trip(self, tmp_path, manifest):
        """Test loading a written manifest."""
        path = manifest.write(tmp_path / 'net.manifest.json')
        loaded = load_manifest(path)
        assert loaded == manifest

    def test_missing_file(self, tmp_path):
        """Test loading a manifest that does not exist."""
        with pytest.raises(TensorIOError):
            load_manifest(tmp_path / 'absent.manifest.json')

    def test_invalid_json(self, tmp_path):
        """Test loading malformed JSON."""
        path = tmp_path / 'bad.manifest.json'
        path.write_text('{"subcommand": \n')
        with pytest.raises(TensorParseError):
            load_manifest(path)

    def test_unknown_fields(self, tmp_path):
        """Test loading JSON with unknown fields."""
        path = tmp_path / 'odd.manifest.json'
        path.write_text(json.dumps({'subcommand': 'info', 'colour': 'red'}))
        with pytest.raises(TensorParseError):
            load_manifest(path)
