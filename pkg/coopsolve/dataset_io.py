"""
Dataset IO Module
Reads and writes game datasets and payoff model files.

Dataset file: one JSON metadata line, then CSV with header x_1..x_F,p_1..p_K.
Floats are written with 17 significant digits so values round-trip exactly.
Model file: JSON document with a schema_version field.
"""

import io
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .datagen import DatasetMetadata, GameDataset
from .errors import DimensionError
from .neural import PayoffModel

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'

PathLike = Union[str, Path]


def dataset_frame(dataset: GameDataset) -> pd.DataFrame:
    columns = [f"x_{i + 1}" for i in range(dataset.n_features)]
    columns += [f"p_{k + 1}" for k in range(dataset.n_outputs)]
    return pd.DataFrame(np.hstack([dataset.features, dataset.labels]), columns=columns)


def write_dataset(dataset: GameDataset, path: PathLike) -> Path:
    """
    Write a dataset file.

    Args:
        dataset: GameDataset to write
        path: Target file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        f.write(json.dumps(dataset.metadata.to_dict(), sort_keys=True) + '\n')
        dataset_frame(dataset).to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"Wrote {len(dataset)} games to {path}")
    return path


def read_dataset(path: PathLike) -> GameDataset:
    """Read a dataset file written by write_dataset."""
    path = Path(path)
    with open(path, 'r') as f:
        metadata = DatasetMetadata.from_dict(json.loads(f.readline()))
        frame = pd.read_csv(io.StringIO(f.read()), float_precision='round_trip')

    x_cols = [c for c in frame.columns if c.startswith('x_')]
    p_cols = [c for c in frame.columns if c.startswith('p_')]
    if len(x_cols) != metadata.max_players:
        raise DimensionError(f"{path} has {len(x_cols)} feature columns, metadata says {metadata.max_players}")
    return GameDataset(frame[x_cols].to_numpy(dtype=float), frame[p_cols].to_numpy(dtype=float), metadata)


def write_model(model: PayoffModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(model.to_dict(), f, sort_keys=True)
    logger.info(f"Wrote {model.n_parameters} parameters to {path}")
    return path


def read_model(path: PathLike) -> PayoffModel:
    with open(path, 'r') as f:
        return PayoffModel.from_dict(json.load(f))
