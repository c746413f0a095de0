"""
Test XAI
Unit tests for ingestion, the target model, feature attribution and distillation.
"""

import numpy as np
import pandas as pd
import pytest

from coopsolve.errors import DimensionError, IngestError, TimingError, TrainingError
from coopsolve.monte_carlo import McConfig
from coopsolve.xai import (
    FeatureGame,
    attribute_instance,
    build_attribution_dataset,
    distillation_architecture,
    distillation_config,
    exact_attribution,
    fit_target_model,
    fraction_sweep,
    ingest,
    read_attributions,
    sample_background,
    speedup_report,
    sweep_frame,
    timed_distillation,
)


def write_csv(tmp_path, text, name='data.csv'):
    path = tmp_path / name
    path.write_text(text)
    return path


def linear_model(coefficients):
    a = np.asarray(coefficients, dtype=float)
    return lambda X: np.asarray(X, dtype=float) @ a


@pytest.fixture
def regression_csv(tmp_path):
    rng = np.random.default_rng(0)
    frame = pd.DataFrame({
        'age': rng.integers(20, 60, size=60),
        'city': rng.choice(['north', 'south', 'east'], size=60),
        'income': rng.normal(50.0, 10.0, size=60).round(2),
    })
    frame['spend'] = 0.5 * frame['income'] + (frame['city'] == 'north') * 5.0
    path = tmp_path / 'spend.csv'
    frame.to_csv(path, index=False)
    return path


class TestIngest:
    """Test CSV ingestion and encoding."""

    def test_numeric_zscore(self, tmp_path):
        """Test numeric columns are standardized with the population std."""
        ds = ingest(write_csv(tmp_path, "x,y\n2,1\n4,2\n6,3\n"))
        np.testing.assert_allclose(ds.X[:, 0], [-1.2247449, 0.0, 1.2247449], atol=1e-6)
        assert ds.spec.numeric['x'][0] == 4.0
        assert ds.spec.target == 'y'

    def test_categorical_codes(self, tmp_path):
        """Test categories are coded in order of first appearance."""
        ds = ingest(write_csv(tmp_path, "c,y\na,1\nb,2\na,3\n"))
        np.testing.assert_array_equal(ds.X[:, 0], [0, 1, 0])
        assert ds.spec.categorical['c'] == ['a', 'b']

    def test_missing_values(self, tmp_path):
        """Test missing feature values encode as 0."""
        ds = ingest(write_csv(tmp_path, "x,c,y\n1,a,1\n,,2\n3,b,3\n"))
        assert ds.X[1].tolist() == [0.0, 0.0]

    def test_header_only(self, tmp_path):
        """Test a file without data rows."""
        with pytest.raises(IngestError, match='no rows'):
            ingest(write_csv(tmp_path, "x,y\n"))

    def test_empty_file(self, tmp_path):
        """Test a completely empty file."""
        with pytest.raises(IngestError):
            ingest(write_csv(tmp_path, ""))

    def test_non_numeric_value_line(self, tmp_path):
        """Test a bad value in a declared numeric column reports its line."""
        path = write_csv(tmp_path, "x,y\n1,1\n2,2\nabc,3\n")
        with pytest.raises(IngestError) as e:
            ingest(path, {'numeric': ['x']})
        assert e.value.line == 4

    def test_missing_target(self, tmp_path):
        """Test a row without a target is rejected."""
        with pytest.raises(IngestError) as e:
            ingest(write_csv(tmp_path, "x,y\n1,1\n2,\n"))
        assert e.value.line == 3

    def test_schema(self, tmp_path):
        """Test target, drop and declared categorical columns."""
        path = write_csv(tmp_path, "id,zip,label,score\n1,100,yes,0.5\n2,200,no,0.7\n3,100,yes,0.1\n")
        ds = ingest(path, {'target': 'label', 'task': 'classification', 'drop': ['id'], 'categorical': ['zip']})
        assert ds.feature_names == ['zip', 'score']
        assert ds.spec.categorical['zip'] == ['100', '200']
        assert ds.spec.target_classes == ['no', 'yes']
        np.testing.assert_array_equal(ds.y, [1, 0, 1])

    def test_unknown_target(self, tmp_path):
        """Test an unknown target column."""
        with pytest.raises(IngestError):
            ingest(write_csv(tmp_path, "x,y\n1,2\n"), {'target': 'z'})

    def test_transform_matches_ingest(self, regression_csv):
        """Test stored parameters reproduce the encoded matrix."""
        ds = ingest(regression_csv)
        frame = pd.read_csv(regression_csv)
        np.testing.assert_allclose(ds.spec.transform(frame), ds.X)


class TestTargetModel:
    """Test the model being explained."""

    def test_regression_tree(self, regression_csv):
        """Test a decision tree fits the training rows."""
        ds = ingest(regression_csv)
        model = fit_target_model(ds, seed=1)
        assert model.train_rows == 48 and model.test_rows == 12
        assert model.train_score == pytest.approx(0.0)
        assert model.predict(ds.X).shape == (60,)
        assert model.to_dict()['estimator'] == 'DecisionTreeRegressor'

    def test_classifier_probability(self, tmp_path):
        """Test classifiers return positive-class probabilities."""
        path = write_csv(tmp_path, "x,y\n" + "".join(f"{i},{'b' if i > 4 else 'a'}\n" for i in range(10)))
        ds = ingest(path, {'task': 'classification'})
        model = fit_target_model(ds, test_fraction=0.0)
        assert model.score_name == 'accuracy'
        predictions = model.predict(ds.X)
        assert np.all((predictions >= 0.0) & (predictions <= 1.0))

    def test_constant_label(self, tmp_path):
        """Test a label that never takes the positive class predicts the constant 0."""
        path = write_csv(tmp_path, "x,label\n" + "".join(f"{i},no\n" for i in range(10)))
        ds = ingest(path, {'task': 'classification'})
        model = fit_target_model(ds, seed=0)
        np.testing.assert_array_equal(model.predict(ds.X[:3]), ds.y[:3])
        np.testing.assert_array_equal(model.predict(ds.X), np.zeros(10))

    def test_training_split_without_positive_rows(self, tmp_path):
        """Test a training split holding only negatives still predicts probability 0."""
        path = write_csv(tmp_path, "x,label\n" + "".join(f"{i},{'yes' if i == 9 else 'no'}\n" for i in range(10)))
        ds = ingest(path, {'task': 'classification'})
        train = ds.X[:9], ds.y[:9]
        model = fit_target_model(ds, test_fraction=0.0)
        model.estimator.fit(*train)
        assert model.positive_class == 1.0
        np.testing.assert_array_equal(model.predict(ds.X), np.zeros(10))

    def test_forest(self, regression_csv):
        """Test more than one tree fits a random forest."""
        model = fit_target_model(ingest(regression_csv), n_trees=5, max_depth=3)
        assert model.to_dict()['estimator'] == 'RandomForestRegressor'

    def test_input_checks(self, regression_csv):
        """Test width checks on prediction."""
        model = fit_target_model(ingest(regression_csv))
        with pytest.raises(DimensionError):
            model.predict(np.zeros((1, 2)))


class TestAttribution:
    """Test per-instance attributions."""

    def test_null_feature(self):
        """Test a feature the model ignores gets zero attribution."""
        model = linear_model([2.0, 0.0, -1.0])
        background = np.random.default_rng(0).normal(size=(8, 3))
        result = attribute_instance(model, np.array([1.0, 5.0, 2.0]), background,
                                    McConfig(permutations=50, resamples=2))
        assert result.phi[1] == pytest.approx(0.0, abs=1e-12)

    def test_additive_single_background(self):
        """Test an additive model against one background row gives a_i (x_i - b_i)."""
        model = linear_model([1.0, 2.0, 3.0])
        x, b = np.array([1.0, 1.0, 1.0]), np.array([[0.0, 0.5, 2.0]])
        result = attribute_instance(model, x, b, McConfig(permutations=20, resamples=1))
        np.testing.assert_allclose(result.phi, [1.0, 1.0, -3.0], atol=1e-12)
        assert result.base_value == pytest.approx(7.0)

    def test_exact_efficiency(self, regression_csv):
        """Test exact attributions add up to prediction minus base value."""
        ds = ingest(regression_csv)
        model = fit_target_model(ds)
        background = sample_background(ds.X, 10, seed=0)
        result = exact_attribution(model, ds.X[0], background)
        assert result.efficiency_gap == pytest.approx(0.0, abs=1e-9)
        assert result.prediction == pytest.approx(model.predict(ds.X[:1])[0])

    def test_sampled_efficiency(self, regression_csv):
        """Test sampled attributions are efficient per permutation."""
        ds = ingest(regression_csv)
        model = fit_target_model(ds)
        result = attribute_instance(model, ds.X[3], sample_background(ds.X, 10), McConfig(permutations=30))
        assert result.efficiency_gap == pytest.approx(0.0, abs=1e-9)

    def test_empty_background(self):
        """Test attribution needs background rows."""
        with pytest.raises(DimensionError):
            FeatureGame(linear_model([1.0]), np.ones(1), np.zeros((0, 1)))

    def test_background_sample(self):
        """Test background rows are drawn without replacement."""
        X = np.arange(40, dtype=float).reshape(20, 2)
        background = sample_background(X, 5, seed=1)
        assert background.shape == (5, 2)
        assert len({tuple(r) for r in background}) == 5
        assert sample_background(X, 50).shape == (20, 2)


class TestAttributionDataset:
    """Test batched attribution with resumable output."""

    def test_build_and_resume(self, tmp_path):
        """Test a resumed run appends only the missing rows."""
        X = np.random.default_rng(0).normal(size=(12, 3))
        model = linear_model([1.0, -1.0, 0.5])
        cfg = McConfig(permutations=20, resamples=1, seed=4)
        path = tmp_path / 'attr.csv'

        full = build_attribution_dataset(X, model, background_size=5, cfg=cfg, path=path, batch_size=4)
        assert len(full) == 12
        np.testing.assert_allclose(full.predictions, model(X), atol=1e-9)

        frame = pd.read_csv(path)
        frame.iloc[:8].to_csv(path, index=False)
        resumed = build_attribution_dataset(X, model, background_size=5, cfg=cfg, path=path, batch_size=4)
        assert resumed.resumed_rows == 8
        assert len(read_attributions(path)) == 12
        np.testing.assert_allclose(resumed.phi, full.phi, atol=1e-12)

    def test_resume_width_mismatch(self, tmp_path):
        """Test an existing file with other features is refused."""
        path = tmp_path / 'attr.csv'
        X = np.ones((3, 2))
        build_attribution_dataset(X, linear_model([1.0, 1.0]), cfg=McConfig(permutations=5, resamples=1), path=path)
        with pytest.raises(DimensionError):
            build_attribution_dataset(np.ones((3, 3)), linear_model([1.0, 1.0, 1.0]), path=path)


class TestDistillation:
    """Test the fraction sweep and the speedup report."""

    @pytest.fixture
    def attributions(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(80, 3))
        return X, X * np.array([1.0, -2.0, 0.5])

    def test_fraction_sweep(self, attributions):
        """Test one point per fraction with matching row counts."""
        X, Phi = attributions
        arch = distillation_architecture(3, hidden=(16,), dropout=0.0)
        points = fraction_sweep(X, Phi, [0.1, 0.5], arch, distillation_config(epochs=5))
        assert [p.train_rows for p in points] == [8, 40]
        assert [p.test_rows for p in points] == [72, 40]
        assert list(sweep_frame(points).columns[:3]) == ['fraction', 'train_rows', 'test_rows']

    @pytest.mark.slow
    def test_more_labels_lower_error(self):
        """Test RMSE at 10% labeled rows beats 1% in at least 9 of 10 seeds."""
        rng = np.random.default_rng(5)
        X = rng.normal(size=(2000, 8))
        Phi = X * rng.uniform(-2.0, 2.0, size=8)
        arch = distillation_architecture(8, hidden=(64, 64), dropout=0.0)
        wins = 0
        for seed in range(10):
            cfg = distillation_config(seed=seed, epochs=200, learning_rate=1e-3, batch_size=32)
            small, large = fraction_sweep(X, Phi, [0.01, 0.10], arch, cfg)
            wins += large.rmse < small.rmse
        assert wins >= 9

    def test_fraction_errors(self, attributions):
        """Test fractions outside (0, 1) or leaving no training row."""
        X, Phi = attributions
        with pytest.raises(TrainingError):
            fraction_sweep(X, Phi, [1.0])
        with pytest.raises(TrainingError):
            fraction_sweep(X, Phi, [0.001])
        with pytest.raises(TrainingError):
            fraction_sweep(X, Phi[:, :2], [0.5])

    def test_speedup_full_fraction(self):
        """Test labeling every row cannot be faster than labeling every row."""
        report = speedup_report({'label_seconds': np.full(100, 0.2), 'train_seconds': 0.5,
                                 'predict_seconds': 0.01}, 1.0)
        assert report.speedup <= 1.0
        assert report.labeled_rows == 100

    def test_speedup_small_fraction(self):
        """Test a cheap network pays off at a small fraction."""
        report = speedup_report({'label_seconds': np.full(1000, 0.1), 'train_seconds': 2.0,
                                 'predict_seconds': 0.1}, 0.1)
        assert report.labeled_rows == 100
        assert report.speedup > 4.0
        assert report.cost_fraction == pytest.approx(1.0 / report.speedup)

    def test_speedup_errors(self):
        """Test missing timings and bad fractions."""
        with pytest.raises(TimingError):
            speedup_report({'label_seconds': [0.1]}, 0.5)
        with pytest.raises(TimingError):
            speedup_report({'label_seconds': [], 'train_seconds': 1.0, 'predict_seconds': 1.0}, 0.5)
        with pytest.raises(ValueError):
            speedup_report({'label_seconds': [0.1], 'train_seconds': 1.0, 'predict_seconds': 1.0}, 0.0)

    def test_timed_distillation(self, attributions):
        """Test the held-out MSE is reported with the timings."""
        X, Phi = attributions
        network, report = timed_distillation(X, Phi, np.full(80, 0.05), 0.25,
                                             distillation_architecture(3, hidden=(8,), dropout=0.0),
                                             distillation_config(epochs=3))
        assert report.labeled_rows == 20
        assert report.distilled_mse is not None
        assert network.metadata['fraction'] == 0.25


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
