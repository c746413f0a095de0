"""
Test CLI
End-to-end runs of main() with exit codes and written artifacts.
"""

import json

import numpy as np
import pandas as pd
import pytest

from main import EXIT_IO, EXIT_OK, EXIT_SOLVER, main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run every command from a scratch directory so logs stay out of the repo."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(workdir, *argv):
    return main([*argv, '--seed', '7', '--threads', '1', '--quiet', '--output-dir', str(workdir / 'out')])


class TestSolve:
    """Test the solve command."""

    def test_parliament_shapley(self, workdir, capsys):
        """Test the printed payoffs and the solution record."""
        assert run(workdir, 'solve', '--weights', '49,49,2', '--quota', '50', '--concept', 'shapley') == EXIT_OK
        assert '0.3333333333' in capsys.readouterr().out
        record = json.loads((workdir / 'out' / 'solve_shapley.json').read_text())
        np.testing.assert_allclose(record['payoffs'], [1 / 3] * 3)
        assert record['meta']['method'] == 'exact'
        manifest = json.loads((workdir / 'out' / 'solve_shapley.json.manifest.json').read_text())
        assert manifest['seed'] == 7
        assert manifest['seed_source'] == 'argument'
        assert manifest['command'] == 'solve'

    def test_second_run_is_versioned(self, workdir):
        """Test an existing artifact is never overwritten."""
        for _ in range(2):
            assert run(workdir, 'solve', '--weights', '2,1,1', '--quota', '3', '--concept', 'banzhaf') == EXIT_OK
        assert (workdir / 'out' / 'solve_banzhaf.json').exists()
        assert (workdir / 'out' / 'solve_banzhaf.v2.json').exists()
        state = json.loads((workdir / 'out' / 'run_state.json').read_text())
        assert state['runs']['solve'] == 2

    def test_raw_banzhaf(self, workdir):
        """Test Banzhaf is raw unless --normalized is given."""
        run(workdir, 'solve', '--weights', '2,1,1', '--quota', '3', '--concept', 'banzhaf', '--output', 'raw.json')
        run(workdir, 'solve', '--weights', '2,1,1', '--quota', '3', '--concept', 'banzhaf', '--normalized',
            '--output', 'norm.json')
        raw = json.loads((workdir / 'out' / 'raw.json').read_text())
        norm = json.loads((workdir / 'out' / 'norm.json').read_text())
        np.testing.assert_allclose(raw['payoffs'], [0.75, 0.25, 0.25])
        np.testing.assert_allclose(norm['payoffs'], [0.6, 0.2, 0.2])

    def test_least_core_from_game_file(self, workdir):
        """Test a JSON game literal with the least core."""
        game = workdir / 'game.json'
        game.write_text(json.dumps({'weights': [49, 49, 2], 'quota': 50}))
        assert run(workdir, 'solve', '--game', str(game), '--concept', 'leastcore') == EXIT_OK
        record = json.loads((workdir / 'out' / 'solve_leastcore.json').read_text())
        assert record['lcv'] == pytest.approx(1 / 3)

    def test_solver_errors(self, workdir):
        """Test invalid games and methods map to the solver exit code."""
        assert run(workdir, 'solve', '--weights', '1,1', '--quota', '5') == EXIT_SOLVER
        assert run(workdir, 'solve', '--weights', '1,1', '--quota', '1', '--concept', 'leastcore',
                   '--method', 'mc') == EXIT_SOLVER
        assert run(workdir, 'solve', '--weights', '1,1,1', '--quota', '2', '--method', 'exact',
                   '--cap', '2') == EXIT_SOLVER

    def test_usage_error(self, workdir):
        """Test argparse rejects unknown concepts."""
        with pytest.raises(SystemExit) as e:
            main(['solve', '--weights', '1,1', '--quota', '1', '--concept', 'nucleolus'])
        assert e.value.code == 2


class TestArgumentErrors:
    """Test missing or conflicting flags exit 2 with usage text."""

    @pytest.mark.parametrize('argv, message', [
        (['gen', '--games', '3'], 'exactly one of --n or --n-list'),
        (['gen', '--n', '3', '--n-list', '3-4'], 'exactly one of --n or --n-list'),
        (['eval', '--n', '3'], '--model, --oracle or --baseline'),
        (['solve', '--weights', '1,1'], 'both --weights and --quota'),
        (['solve', '--quota', '1'], 'both --weights and --quota'),
        (['solve', '--game', 'g.json', '--weights', '1,1'], 'cannot be combined'),
        (['sweep', '--type', 'quota'], '--weights or --eu4'),
        (['sweep', '--type', 'weight'], 'both --weights and --quota'),
        (['solve', '--weights', '1,x', '--quota', '1'], '--weights'),
        (['gen', '--n-list', '4-a'], '--n-list'),
        (['xai', '--data', 'd.csv', '--fractions', '0.1,half'], '--fractions'),
    ])
    def test_usage_exit(self, workdir, capsys, argv, message):
        """Test each invalid combination is rejected before any work starts."""
        with pytest.raises(SystemExit) as e:
            run(workdir, *argv)
        assert e.value.code == 2
        err = capsys.readouterr().err
        assert 'usage:' in err
        assert message in err
        assert not (workdir / 'out').exists()

    def test_eu4_weight_sweep_needs_no_game(self, workdir):
        """Test --eu4 stands in for a game on weight sweeps."""
        assert run(workdir, 'sweep', '--type', 'weight', '--eu4', '--player', '3', '--until', '9',
                   '--concept', 'banzhaf') == EXIT_OK


class TestPipeline:
    """Test gen, train, eval and sweep together."""

    @pytest.mark.slow
    def test_gen_train_eval(self, workdir):
        """Test a small dataset flows through training and evaluation."""
        out = workdir / 'out'
        assert run(workdir, 'gen', '--n', '3', '--games', '20', '--concept', 'shapley') == EXIT_OK
        assert (out / 'shapley_n3.csv').exists()

        assert run(workdir, 'train', '--data', str(out / 'shapley_n3.csv'), '--max-epochs', '3',
                   '--hidden', '8', '--batch-size', '8') == EXIT_OK
        model = out / 'model_shapley_fixed_n3.json'
        assert model.exists()

        assert run(workdir, 'eval', '--model', str(model), '--n', '3', '--games', '5') == EXIT_OK
        report = json.loads((out / 'eval_shapley_in-sample_n3.json').read_text())
        assert report['games'] == 5

    def test_oracle_eval(self, workdir):
        """Test the exact solver evaluated against itself."""
        assert run(workdir, 'eval', '--oracle', '--concept', 'banzhaf', '--n', '3', '--games', '4') == EXIT_OK
        report = json.loads((workdir / 'out' / 'eval_banzhaf_in-sample_n3.json').read_text())
        assert report['mean_mae'] == pytest.approx(0.0, abs=1e-12)

    def test_quota_sweep(self, workdir):
        """Test a quota sweep CSV."""
        assert run(workdir, 'sweep', '--type', 'quota', '--weights', '2,1,1', '--step', '1') == EXIT_OK
        frame = pd.read_csv(workdir / 'out' / 'sweep_quota_shapley.csv')
        assert frame['quota'].tolist() == [1.0, 2.0, 3.0, 4.0]


class TestReproducibility:
    """Test seeded runs write byte-identical artifacts."""

    @staticmethod
    def seeded(workdir, out, *argv):
        return main([*argv, '--seed', '7', '--threads', '1', '--quiet', '--output-dir', str(workdir / out)])

    def test_solve_mc(self, workdir):
        """Test two sampled solves with the same seed."""
        for out in ('a', 'b'):
            assert self.seeded(workdir, out, 'solve', '--weights', '3,3,2,2,1', '--quota', '6',
                               '--method', 'mc', '--permutations', '200', '--resamples', '3') == EXIT_OK
        first = (workdir / 'a' / 'solve_shapley.json').read_bytes()
        assert first == (workdir / 'b' / 'solve_shapley.json').read_bytes()

    @pytest.mark.slow
    def test_gen_and_train(self, workdir):
        """Test repeated generation and training from the same seed."""
        for out in ('a', 'b'):
            assert self.seeded(workdir, out, 'gen', '--n', '4', '--games', '30', '--concept', 'banzhaf') == EXIT_OK
            assert self.seeded(workdir, out, 'train', '--data', str(workdir / out / 'banzhaf_n4.csv'),
                               '--max-epochs', '5', '--hidden', '8', '--batch-size', '8') == EXIT_OK

        for name in ('banzhaf_n4.csv', 'model_banzhaf_fixed_n4.json'):
            assert (workdir / 'a' / name).read_bytes() == (workdir / 'b' / name).read_bytes()


class TestXai:
    """Test the xai command."""

    def test_missing_file(self, workdir):
        """Test a missing input file maps to the I/O exit code."""
        assert run(workdir, 'xai', '--data', str(workdir / 'absent.csv')) == EXIT_IO

    def test_header_only(self, workdir):
        """Test a header-only file maps to the I/O exit code."""
        path = workdir / 'empty.csv'
        path.write_text("x,y\n")
        assert run(workdir, 'xai', '--data', str(path)) == EXIT_IO

    @pytest.mark.slow
    def test_attribution_run(self, workdir):
        """Test attributions, the fraction sweep and the distilled network are written."""
        rng = np.random.default_rng(0)
        frame = pd.DataFrame({'a': rng.normal(size=20), 'b': rng.choice(['u', 'v'], size=20)})
        frame['y'] = 2.0 * frame['a'] + (frame['b'] == 'u')
        frame.to_csv(workdir / 'data.csv', index=False)

        code = run(workdir, 'xai', '--data', str(workdir / 'data.csv'), '--permutations', '5',
                   '--resamples', '1', '--background', '5', '--fractions', '0.25,0.5', '--epochs', '2',
                   '--hidden', '8', '--speedup-fraction', '0.2')
        assert code == EXIT_OK
        out = workdir / 'out'
        attributions = pd.read_csv(out / 'attributions.csv')
        assert len(attributions) == 20
        assert {'x_1', 'x_2', 'phi_1', 'phi_2', 'base_value', 'seconds'} <= set(attributions.columns)
        assert len(pd.read_csv(out / 'attributions_fractions.csv')) == 2
        sweep = json.loads((out / 'attributions_sweep.json').read_text())
        assert sweep['speedup']['labeled_rows'] == 4
        assert (out / 'attributions_distilled.json').exists()


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
