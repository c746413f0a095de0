"""
Distillation Module
Trains a network to predict attributions from features and measures how the
error and the total cost scale with the share of rows that are labeled by
sampling.
"""

import logging
import time
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import TimingError, TrainingError
from ..monte_carlo import McConfig
from ..neural import INIT_STREAM, SHUFFLE_STREAM, MlpArchitecture, PayoffModel, TrainConfig, fit_network
from .attribution import DEFAULT_BACKGROUND_SIZE, build_attribution_dataset
from .preprocessing import TabularDataset

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = tuple(float(t) for t in np.geomspace(0.005, 0.5, 20))
DISTILLATION_EPOCHS = 100
FRACTION_STREAM = 4


def distillation_architecture(n_features: int, hidden: Sequence[int] = (128, 128, 128),
                              dropout: float = 0.1) -> MlpArchitecture:
    """F inputs, F signed outputs."""
    return MlpArchitecture(
        input_dim=n_features,
        payoff_dim=n_features,
        hidden=tuple(hidden),
        dropout=dropout,
        epsilon_head=False,
        output='linear',
    )


def distillation_config(seed: int = 0, epochs: int = DISTILLATION_EPOCHS, **overrides) -> TrainConfig:
    return TrainConfig(**{
        'max_epochs': epochs,
        'early_stopping': False,
        'learning_rate': 1e-4,
        'adam_eps': 1e-5,
        'seed': seed,
        **overrides,
    })


@dataclass
class FractionPoint:
    fraction: float
    train_rows: int
    test_rows: int
    rmse: float
    train_seconds: float
    predict_seconds: float


def _split_rows(rows: int, fraction: float, rng: np.random.Generator):
    train_rows = int(round(fraction * rows))
    if train_rows < 1:
        raise TrainingError(f"Fraction {fraction} of {rows} rows leaves no training row")
    if train_rows >= rows:
        raise TrainingError(f"Fraction {fraction} of {rows} rows leaves no evaluation row")
    order = rng.permutation(rows)
    return order[:train_rows], order[train_rows:]


def distill(X: np.ndarray, Phi: np.ndarray, arch: MlpArchitecture, cfg: TrainConfig,
            rng_key: Sequence[int] = ()) -> PayoffModel:
    """Fit a distillation network on all given rows for cfg.max_epochs epochs."""
    model = PayoffModel.initialize(arch, np.random.default_rng([cfg.seed, INIT_STREAM, *rng_key]),
                                   metadata={'concept': 'attribution', 'layout': 'fixed'})
    fit_network(model, X, Phi, cfg, np.random.default_rng([cfg.seed, SHUFFLE_STREAM, *rng_key]))
    return model


def fraction_sweep(X: np.ndarray, Phi: np.ndarray, fractions: Sequence[float] = None,
                   arch: MlpArchitecture = None, cfg: TrainConfig = None) -> List[FractionPoint]:
    """
    Train on a fraction t of the rows and measure RMSE on the rest, for each t.

    Args:
        X: Feature matrix (N, F)
        Phi: Attribution matrix (N, F)
        fractions: Training shares in (0, 1)
        arch: Network architecture (default: three hidden layers of 128, linear head)
        cfg: Training configuration (default: 100 epochs, no early stopping)

    Returns:
        One FractionPoint per fraction
    """
    X = np.asarray(X, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    if X.shape != Phi.shape:
        raise TrainingError(f"Features {X.shape} and attributions {Phi.shape} do not align")
    fractions = list(DEFAULT_FRACTIONS if fractions is None else fractions)
    for t in fractions:
        if not 0.0 < t < 1.0:
            raise TrainingError(f"Fractions must lie in (0, 1), got {t}")
    arch = arch or distillation_architecture(X.shape[1])
    cfg = cfg or distillation_config()

    points = []
    for k, t in enumerate(fractions):
        train_idx, test_idx = _split_rows(X.shape[0], t, np.random.default_rng([cfg.seed, FRACTION_STREAM, k]))
        started = time.perf_counter()
        model = distill(X[train_idx], Phi[train_idx], arch, cfg, rng_key=(k,))
        trained = time.perf_counter()
        predicted = model.predict(X[test_idx])
        finished = time.perf_counter()
        rmse = float(np.sqrt(np.mean((predicted - Phi[test_idx]) ** 2)))
        points.append(FractionPoint(t, int(train_idx.size), int(test_idx.size), rmse,
                                    trained - started, finished - trained))
        logger.info(f"Fraction {t:.4f}: {train_idx.size} training rows, RMSE {rmse:.6g}")
    return points


def sweep_frame(points: Sequence[FractionPoint]) -> pd.DataFrame:
    return pd.DataFrame([asdict(p) for p in points])


@dataclass
class SpeedupReport:
    fraction: float
    total_rows: int
    labeled_rows: int
    full_seconds: float
    labeling_seconds: float
    train_seconds: float
    predict_seconds: float
    distilled_mse: Optional[float] = None

    @property
    def distilled_seconds(self) -> float:
        return self.labeling_seconds + self.train_seconds + self.predict_seconds

    @property
    def cost_fraction(self) -> float:
        """Distilled cost over the cost of labeling every row."""
        return self.distilled_seconds / self.full_seconds

    @property
    def speedup(self) -> float:
        return self.full_seconds / self.distilled_seconds

    def to_dict(self) -> Dict:
        data = asdict(self)
        data.update(distilled_seconds=self.distilled_seconds, cost_fraction=self.cost_fraction,
                    speedup=self.speedup)
        return data


def speedup_report(timings: Dict, fraction: float) -> SpeedupReport:
    """
    Compare sampling every row with sampling a fraction and distilling the rest.

    Args:
        timings: Mapping with label_seconds (per-row labeling times for all rows),
            train_seconds and predict_seconds; distilled_mse is optional
        fraction: Share of rows labeled by sampling

    Returns:
        SpeedupReport
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"Fraction must lie in (0, 1], got {fraction}")
    missing = [k for k in ('label_seconds', 'train_seconds', 'predict_seconds') if timings.get(k) is None]
    if missing:
        raise TimingError(f"Missing timings: {', '.join(missing)}")
    per_row = np.asarray(timings['label_seconds'], dtype=float).reshape(-1)
    if per_row.size == 0:
        raise TimingError("No per-row labeling timings recorded")
    full = float(per_row.sum())
    if full <= 0.0:
        raise TimingError("Labeling timings sum to zero")
    labeled = max(1, int(round(fraction * per_row.size)))
    report = SpeedupReport(
        fraction=fraction,
        total_rows=int(per_row.size),
        labeled_rows=labeled,
        full_seconds=full,
        labeling_seconds=float(per_row.mean() * labeled),
        train_seconds=float(timings['train_seconds']),
        predict_seconds=float(timings['predict_seconds']),
        distilled_mse=timings.get('distilled_mse'),
    )
    logger.info(f"Fraction {fraction}: speedup {report.speedup:.2f}x (cost fraction {report.cost_fraction:.3f})")
    return report


def timed_distillation(X: np.ndarray, Phi: np.ndarray, label_seconds: np.ndarray, fraction: float,
                       arch: MlpArchitecture = None, cfg: TrainConfig = None) -> Tuple[PayoffModel, SpeedupReport]:
    """
    Distill from a fraction of already-labeled rows and time training and prediction.

    Args:
        X: Feature matrix (N, F)
        Phi: Sampled attributions (N, F)
        label_seconds: Per-row labeling times
        fraction: Share of rows used for training, in (0, 1]
        arch: Distillation architecture
        cfg: Distillation training configuration

    Returns:
        Tuple of (distilled network, SpeedupReport with the MSE on the held-out rows)
    """
    cfg = cfg or distillation_config()
    arch = arch or distillation_architecture(X.shape[1])
    rows = X.shape[0]
    order = np.random.default_rng([cfg.seed, FRACTION_STREAM]).permutation(rows)
    labeled = max(1, int(round(fraction * rows)))
    train_idx, test_idx = order[:labeled], order[labeled:]

    started = time.perf_counter()
    network = distill(X[train_idx], Phi[train_idx], arch, cfg)
    trained = time.perf_counter()
    predicted = network.predict(X[test_idx])
    finished = time.perf_counter()

    report = speedup_report({
        'label_seconds': label_seconds,
        'train_seconds': trained - started,
        'predict_seconds': finished - trained,
        'distilled_mse': float(np.mean((predicted - Phi[test_idx]) ** 2)) if test_idx.size else None,
    }, fraction)
    network.metadata['fraction'] = fraction
    return network, report


def measure_speedup(ds: TabularDataset, model, fraction: float = 0.1,
                    background_size: int = DEFAULT_BACKGROUND_SIZE, mc_config: McConfig = None,
                    arch: MlpArchitecture = None, cfg: TrainConfig = None,
                    n_jobs: int = 1) -> SpeedupReport:
    """
    End-to-end timing: label every row, then time distilling from a fraction.

    Args:
        ds: Ingested dataset
        model: Target model
        fraction: Share of rows labeled by sampling
        background_size: Background rows for the attribution game
        mc_config: Permutation budget and seed
        arch: Distillation architecture
        cfg: Distillation training configuration
        n_jobs: Parallel workers for labeling

    Returns:
        SpeedupReport with the distilled-vs-sampled MSE on the rows that were not labeled
    """
    matrix = build_attribution_dataset(ds, model, background_size, mc_config, n_jobs=n_jobs)
    _, report = timed_distillation(matrix.X, matrix.phi, matrix.seconds, fraction, arch, cfg)
    return report
