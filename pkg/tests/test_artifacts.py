"""
Test Artifacts
Unit tests for versioned artifact output, manifests and the run state file.
"""

import json
import subprocess
from unittest.mock import Mock, patch

import numpy as np
import pandas as pd
import pytest

from pipeline.runners.common import parse_float_list, parse_int_list
from pipeline.writers import ArtifactWriter, manifest_path, resolve_seed, versioned_path
from pipeline.writers.artifact_writer import git_describe
from utils.run_state import RunStateManager


class TestVersionedPath:
    """Test never-overwrite naming."""

    def test_free_name(self, tmp_path):
        """Test an unused name is version 1."""
        assert versioned_path(tmp_path / 'a.csv') == (tmp_path / 'a.csv', 1)

    def test_next_version(self, tmp_path):
        """Test taken names move to .v2, .v3."""
        (tmp_path / 'a.csv').touch()
        (tmp_path / 'a.v2.csv').touch()
        assert versioned_path(tmp_path / 'a.csv') == (tmp_path / 'a.v3.csv', 3)


class TestSeed:
    """Test seed resolution."""

    def test_argument(self):
        """Test an explicit seed is kept."""
        assert resolve_seed(5) == (5, 'argument')

    def test_entropy(self):
        """Test a missing seed is drawn and its entropy recorded."""
        seed, source = resolve_seed(None)
        assert 0 <= seed < 2 ** 32
        assert source.startswith('entropy:')


class TestGitDescribe:
    """Test the code-version lookup."""

    @patch('pipeline.writers.artifact_writer.subprocess.run')
    def test_describe(self, mock_run):
        """Test the describe output is used."""
        mock_run.return_value = Mock(returncode=0, stdout='v1.0.0-3-gabc\n')
        assert git_describe() == 'v1.0.0-3-gabc'

    @patch('pipeline.writers.artifact_writer.subprocess.run', side_effect=OSError('no git'))
    def test_unknown(self, mock_run):
        """Test a missing git binary."""
        assert git_describe() == 'unknown'

    @patch('pipeline.writers.artifact_writer.subprocess.run',
           side_effect=subprocess.TimeoutExpired('git', 10))
    def test_timeout(self, mock_run):
        """Test a hanging git call."""
        assert git_describe() == 'unknown'


class TestArtifactWriter:
    """Test artifact output with manifests."""

    @pytest.fixture
    def writer(self, tmp_path):
        state = RunStateManager(str(tmp_path / 'state.json'))
        return ArtifactWriter(str(tmp_path / 'out'), 'solve', {'weights': '1,2', 'quota': np.float64(2.0)},
                              seed=3, state=state, version='1.0.0')

    @patch('pipeline.writers.artifact_writer.git_describe', return_value='abc123')
    def test_manifest(self, mock_git, writer, tmp_path):
        """Test the manifest records command, args, seed and version."""
        path = writer.write_json('result.json', {'payoffs': np.array([0.5, 0.5])}, summary={'players': 2})
        assert path == tmp_path / 'out' / 'result.json'
        assert json.loads(path.read_text()) == {'payoffs': [0.5, 0.5]}
        manifest = json.loads(manifest_path(path).read_text())
        assert manifest['git'] == 'abc123'
        assert manifest['args'] == {'weights': '1,2', 'quota': 2.0}
        assert manifest['seed'] == 3
        assert manifest['artifact_version'] == 1
        assert manifest['coopsolve_version'] == '1.0.0'
        assert manifest['summary'] == {'players': 2}

    def test_versions_and_state(self, writer, tmp_path):
        """Test repeated writes get new versions and land in the state file."""
        frame = pd.DataFrame({'x': [1.0, 2.0]})
        first = writer.write_csv('table.csv', frame)
        second = writer.write_csv('table.csv', frame)
        assert second.name == 'table.v2.csv'
        assert writer.written == [first, second]
        state = RunStateManager(str(tmp_path / 'state.json'))
        assert [a['version'] for a in state.artifacts('solve')] == [1, 2]
        assert state.get('last_artifact') == str(second)

    def test_failed_write_leaves_nothing(self, writer, tmp_path):
        """Test an exception removes the partial file and writes no manifest."""
        with pytest.raises(RuntimeError):
            with writer.artifact('broken.csv') as path:
                path.write_text('half')
                raise RuntimeError('interrupted')
        assert list((tmp_path / 'out').iterdir()) == []
        assert writer.written == []

    def test_absolute_name(self, writer, tmp_path):
        """Test names with a directory bypass the output directory."""
        assert writer.resolve(str(tmp_path / 'elsewhere.csv')) == tmp_path / 'elsewhere.csv'
        assert writer.resolve('plain.csv') == tmp_path / 'out' / 'plain.csv'


class TestRunStateManager:
    """Test the JSON state file."""

    def test_round_trip(self, tmp_path):
        """Test values persist across managers."""
        state = RunStateManager(str(tmp_path / 'nested' / 'state.json'))
        state.set('last_seed', 9)
        state.update({'note': 'x'})
        state.save_state()
        again = RunStateManager(str(tmp_path / 'nested' / 'state.json'))
        assert again.get('last_seed') == 9
        assert again.get('note') == 'x'

    def test_corrupt_file(self, tmp_path):
        """Test an unreadable state file starts empty."""
        path = tmp_path / 'state.json'
        path.write_text('{not json')
        assert RunStateManager(str(path)).state == {}


class TestListArguments:
    """Test list-valued command-line arguments."""

    def test_int_ranges(self):
        """Test ranges and lists."""
        assert parse_int_list('4-6') == [4, 5, 6]
        assert parse_int_list('4,6') == [4, 6]
        with pytest.raises(ValueError):
            parse_int_list(' , ')

    def test_floats(self):
        """Test comma-separated fractions."""
        assert parse_float_list('0.1, 0.5') == [0.1, 0.5]


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
