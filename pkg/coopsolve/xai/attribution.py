"""
Attribution Module
Shapley feature attributions of a target model's predictions.

The value of a feature coalition at an instance x is the mean model output
over the background rows with the coalition's features replaced by x's
values. Attributions are estimated by permutation sampling over that game.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from ..errors import DimensionError, IngestError
from ..exact import shapley_exact
from ..monte_carlo import McConfig, shapley_mc
from .preprocessing import TabularDataset

logger = logging.getLogger(__name__)

DEFAULT_BACKGROUND_SIZE = 32
EXACT_FEATURE_CAP = 12
BACKGROUND_STREAM = 3
FLOAT_FORMAT = '%.17g'

PredictFn = Callable[[np.ndarray], np.ndarray]


def _predict_fn(model) -> PredictFn:
    return model.predict if hasattr(model, 'predict') else model


class FeatureGame:
    """Feature-coalition game of one instance against a background sample."""

    def __init__(self, model, instance: np.ndarray, background: np.ndarray):
        self.predict = _predict_fn(model)
        self.instance = np.asarray(instance, dtype=float).reshape(-1)
        self.background = np.atleast_2d(np.asarray(background, dtype=float))
        if self.background.shape[0] == 0:
            raise DimensionError("Attribution needs at least one background row")
        if self.background.shape[1] != self.instance.size:
            raise DimensionError(
                f"Background has {self.background.shape[1]} features, instance has {self.instance.size}"
            )
        self.n_players = self.instance.size

    def values(self, members: np.ndarray) -> np.ndarray:
        members = np.asarray(members, dtype=bool)
        k, rows = members.shape[0], self.background.shape[0]
        composite = np.where(members[:, None, :], self.instance[None, None, :], self.background[None, :, :])
        outputs = np.asarray(self.predict(composite.reshape(k * rows, self.n_players)), dtype=float)
        return outputs.reshape(k, rows).mean(axis=1)

    @property
    def base_value(self) -> float:
        return float(self.values(np.zeros((1, self.n_players), dtype=bool))[0])

    @property
    def full_value(self) -> float:
        return float(self.values(np.ones((1, self.n_players), dtype=bool))[0])


@dataclass
class Attribution:
    phi: np.ndarray
    base_value: float
    prediction: float
    std_errors: Optional[np.ndarray] = None
    seconds: float = 0.0

    @property
    def efficiency_gap(self) -> float:
        """base + sum(phi) - f(x)"""
        return float(self.base_value + self.phi.sum() - self.prediction)


def attribute_instance(model, x: np.ndarray, background: np.ndarray,
                       cfg: McConfig = None) -> Attribution:
    """
    Sampled Shapley attribution of one prediction.

    Args:
        model: TargetModel or a callable mapping (rows, F) to (rows,)
        x: Instance to explain
        background: Background rows (at least one)
        cfg: Permutation budget and seed

    Returns:
        Attribution with per-feature values, base value and std-errors
    """
    started = time.perf_counter()
    game = FeatureGame(model, x, background)
    solution = shapley_mc(game, cfg or McConfig())
    return Attribution(
        phi=solution.payoffs,
        base_value=game.base_value,
        prediction=game.full_value,
        std_errors=solution.std_errors,
        seconds=time.perf_counter() - started,
    )


def exact_attribution(model, x: np.ndarray, background: np.ndarray,
                      cap: int = EXACT_FEATURE_CAP) -> Attribution:
    """Attribution by full enumeration of the 2^F feature coalitions."""
    started = time.perf_counter()
    game = FeatureGame(model, x, background)
    solution = shapley_exact(game, cap=cap)
    return Attribution(
        phi=solution.payoffs,
        base_value=game.base_value,
        prediction=game.full_value,
        seconds=time.perf_counter() - started,
    )


def sample_background(X: np.ndarray, size: int = DEFAULT_BACKGROUND_SIZE, seed: int = 0) -> np.ndarray:
    """Uniform sample of rows without replacement (all rows when there are fewer)."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise DimensionError("Cannot sample a background from an empty matrix")
    rng = np.random.default_rng([seed, BACKGROUND_STREAM])
    if X.shape[0] <= size:
        return X.copy()
    return X[np.sort(rng.choice(X.shape[0], size=size, replace=False))]


def row_config(cfg: McConfig, row: int) -> McConfig:
    """Per-row sampling stream derived from the base seed."""
    derived = np.random.SeedSequence([cfg.seed, row]).generate_state(1)[0]
    return cfg.with_seed(int(derived))


@dataclass(eq=False)
class AttributionMatrix:
    X: np.ndarray
    phi: np.ndarray
    base_values: np.ndarray
    seconds: np.ndarray
    feature_names: List[str] = field(default_factory=list)
    resumed_rows: int = 0

    def __len__(self):
        return int(self.phi.shape[0])

    @property
    def predictions(self) -> np.ndarray:
        return self.base_values + self.phi.sum(axis=1)

    def to_frame(self) -> pd.DataFrame:
        F = self.X.shape[1]
        frame = pd.DataFrame(self.X, columns=[f"x_{i + 1}" for i in range(F)])
        for i in range(F):
            frame[f"phi_{i + 1}"] = self.phi[:, i]
        frame['base_value'] = self.base_values
        frame['seconds'] = self.seconds
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, feature_names: List[str] = None) -> 'AttributionMatrix':
        x_cols = [c for c in frame.columns if c.startswith('x_')]
        phi_cols = [c for c in frame.columns if c.startswith('phi_')]
        if len(x_cols) != len(phi_cols) or 'base_value' not in frame.columns:
            raise IngestError("Attribution file is missing x_*, phi_* or base_value columns")
        return cls(
            X=frame[x_cols].to_numpy(dtype=float),
            phi=frame[phi_cols].to_numpy(dtype=float),
            base_values=frame['base_value'].to_numpy(dtype=float),
            seconds=frame['seconds'].to_numpy(dtype=float) if 'seconds' in frame.columns
            else np.zeros(len(frame)),
            feature_names=list(feature_names or []),
        )


def read_attributions(path: Union[str, Path], feature_names: List[str] = None) -> AttributionMatrix:
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except pd.errors.EmptyDataError as e:
        raise IngestError(f"{path} is empty") from e
    return AttributionMatrix.from_frame(frame, feature_names)


def _existing_rows(path: Path, F: int) -> int:
    if not path.exists() or path.stat().st_size == 0:
        return 0
    done = read_attributions(path)
    if done.X.shape[1] != F:
        raise DimensionError(f"{path} holds {done.X.shape[1]} features, dataset has {F}")
    return len(done)


def build_attribution_dataset(ds: Union[TabularDataset, np.ndarray], model,
                              background_size: int = DEFAULT_BACKGROUND_SIZE,
                              cfg: McConfig = None, path: Union[str, Path] = None,
                              batch_size: int = 500, n_jobs: int = 1,
                              progress: bool = False) -> AttributionMatrix:
    """
    Attribute every row of a dataset.

    Rows are labeled in batches; with a path each finished batch is appended
    to the CSV file, and rows already present in the file are not recomputed.

    Args:
        ds: TabularDataset or feature matrix
        model: TargetModel or prediction callable
        background_size: Background rows sampled with the config's seed
        cfg: Permutation budget and base seed (each row draws its own stream)
        path: Optional CSV file to append to and resume from
        batch_size: Rows per batch
        n_jobs: Parallel workers over rows
        progress: Show a progress bar

    Returns:
        AttributionMatrix over all rows
    """
    cfg = cfg or McConfig()
    X = ds.X if isinstance(ds, TabularDataset) else np.asarray(ds, dtype=float)
    names = ds.feature_names if isinstance(ds, TabularDataset) else []
    N, F = X.shape
    background = sample_background(X, background_size, cfg.seed)
    predict = _predict_fn(model)

    path = Path(path) if path is not None else None
    start = 0
    if path is not None:
        start = _existing_rows(path, F)
        if start > N:
            raise DimensionError(f"{path} holds {start} rows, dataset has {N}")
        if start:
            logger.info(f"Resuming attribution at row {start} of {N} from {path}")
        path.parent.mkdir(parents=True, exist_ok=True)

    computed: List[Attribution] = []
    batches = range(start, N, batch_size)
    for offset in tqdm(batches, desc='Attributing', unit='batch', disable=not progress):
        stop = min(offset + batch_size, N)
        logger.info(f"Attributing rows batch: {offset} to {stop}")
        jobs = [(X[row], row_config(cfg, row)) for row in range(offset, stop)]
        if n_jobs == 1:
            batch = [attribute_instance(predict, x, background, c) for x, c in jobs]
        else:
            batch = Parallel(n_jobs=n_jobs)(delayed(attribute_instance)(predict, x, background, c) for x, c in jobs)
        computed.extend(batch)
        if path is not None:
            frame = AttributionMatrix(
                X=X[offset:stop],
                phi=np.vstack([a.phi for a in batch]),
                base_values=np.array([a.base_value for a in batch]),
                seconds=np.array([a.seconds for a in batch]),
            ).to_frame()
            frame.to_csv(path, mode='a', header=(offset == 0), index=False,
                         float_format=FLOAT_FORMAT, lineterminator='\n')

    if path is not None and start:
        matrix = read_attributions(path, names)
        matrix.resumed_rows = start
    else:
        matrix = AttributionMatrix(
            X=X.copy(),
            phi=np.vstack([a.phi for a in computed]) if computed else np.zeros((0, F)),
            base_values=np.array([a.base_value for a in computed]),
            seconds=np.array([a.seconds for a in computed]),
            feature_names=list(names),
        )
    logger.info(f"Attributed {len(computed)} rows ({start} resumed) with {cfg.permutations * cfg.resamples} "
                f"permutations each")
    return matrix
