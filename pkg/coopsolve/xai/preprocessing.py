"""
Tabular Preprocessing
Ingests a CSV file into a numeric feature matrix.

Numeric columns are z-scored with the population standard deviation,
categorical columns are integer-encoded in order of first appearance and
missing values become 0 after encoding.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import IngestError

logger = logging.getLogger(__name__)

TASKS = ('regression', 'classification')

_LINE_PATTERN = re.compile(r'line (\d+)')


@dataclass
class PreprocessingSpec:
    """Column kinds, encoding maps and z-score parameters of an ingested table."""

    target: str
    features: List[str]
    numeric: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    categorical: Dict[str, List[str]] = field(default_factory=dict)
    target_classes: Optional[List[str]] = None

    def transform(self, frame: pd.DataFrame) -> np.ndarray:
        """
        Encode a raw frame with the stored parameters.

        Args:
            frame: Frame holding at least the feature columns

        Returns:
            Feature matrix (rows, features)
        """
        missing = [c for c in self.features if c not in frame.columns]
        if missing:
            raise IngestError(f"Columns missing from input: {', '.join(missing)}")
        columns = []
        for name in self.features:
            if name in self.numeric:
                mean, std = self.numeric[name]
                values = pd.to_numeric(frame[name], errors='coerce').to_numpy(dtype=float)
                columns.append((values - mean) / std)
            else:
                lookup = {value: code for code, value in enumerate(self.categorical[name])}
                raw = frame[name]
                codes = [lookup.get(str(v), np.nan) if not pd.isna(v) else np.nan for v in raw]
                columns.append(np.asarray(codes, dtype=float))
        matrix = np.column_stack(columns) if columns else np.zeros((len(frame), 0))
        return np.nan_to_num(matrix, nan=0.0)

    def to_dict(self) -> Dict:
        return {
            'target': self.target,
            'features': list(self.features),
            'numeric': {k: [float(m), float(s)] for k, (m, s) in self.numeric.items()},
            'categorical': {k: list(v) for k, v in self.categorical.items()},
            'target_classes': self.target_classes,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'PreprocessingSpec':
        return cls(
            target=data['target'],
            features=list(data['features']),
            numeric={k: (float(v[0]), float(v[1])) for k, v in data.get('numeric', {}).items()},
            categorical={k: [str(x) for x in v] for k, v in data.get('categorical', {}).items()},
            target_classes=data.get('target_classes'),
        )


@dataclass(eq=False)
class TabularDataset:
    X: np.ndarray
    y: np.ndarray
    spec: PreprocessingSpec
    task: str = 'regression'

    @property
    def feature_names(self) -> List[str]:
        return self.spec.features

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    def __len__(self):
        return self.n_rows


def _read_frame(path: Path, categorical: List[str]) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype={c: str for c in categorical} or None, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise IngestError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        match = _LINE_PATTERN.search(str(e))
        line = int(match.group(1)) if match else None
        raise IngestError(f"Malformed row in {path}", line=line) from e


def _file_line(index: int) -> int:
    # row 0 sits on line 2, below the header
    return int(index) + 2


def _encode_numeric(frame: pd.DataFrame, name: str) -> Tuple[np.ndarray, float, float]:
    raw = frame[name]
    values = pd.to_numeric(raw, errors='coerce')
    bad = values.isna() & raw.notna()
    if bad.any():
        first = bad.to_numpy().nonzero()[0][0]
        raise IngestError(f"Non-numeric value {raw.iloc[first]!r} in column {name}", line=_file_line(first))
    array = values.to_numpy(dtype=float)
    present = array[~np.isnan(array)]
    mean = float(present.mean()) if present.size else 0.0
    std = float(present.std(ddof=0)) if present.size else 0.0
    if std == 0.0:
        std = 1.0
    return np.nan_to_num((array - mean) / std, nan=0.0), mean, std


def _encode_categorical(frame: pd.DataFrame, name: str) -> Tuple[np.ndarray, List[str]]:
    raw = frame[name].map(lambda v: v if pd.isna(v) else str(v))
    codes, uniques = pd.factorize(raw, sort=False)
    codes = codes.astype(float)
    codes[codes < 0] = 0.0
    return codes, [str(u) for u in uniques]


def _encode_target(frame: pd.DataFrame, name: str, task: str) -> Tuple[np.ndarray, Optional[List[str]]]:
    raw = frame[name]
    if raw.isna().any():
        first = raw.isna().to_numpy().nonzero()[0][0]
        raise IngestError(f"Missing target value in column {name}", line=_file_line(first))
    if task == 'regression':
        values = pd.to_numeric(raw, errors='coerce')
        if values.isna().any():
            first = values.isna().to_numpy().nonzero()[0][0]
            raise IngestError(f"Non-numeric target {raw.iloc[first]!r}", line=_file_line(first))
        return values.to_numpy(dtype=float), None
    codes, uniques = pd.factorize(raw.map(str), sort=True)
    return codes.astype(float), [str(u) for u in uniques]


def ingest(path: Union[str, Path], schema: Mapping = None) -> TabularDataset:
    """
    Read and encode a tabular CSV file.

    Args:
        path: CSV file with a header row
        schema: Optional mapping with keys target (default: last column), task,
            numeric, categorical and drop. Unlisted columns are typed by pandas:
            numeric dtypes are numeric, everything else categorical.

    Returns:
        TabularDataset
    """
    path = Path(path)
    schema = dict(schema or {})
    task = schema.get('task', 'regression')
    if task not in TASKS:
        raise IngestError(f"Unknown task {task!r}; expected one of {', '.join(TASKS)}")
    declared_categorical = list(schema.get('categorical', []))
    frame = _read_frame(path, declared_categorical)
    if frame.empty:
        raise IngestError(f"{path} holds a header but no rows")

    target = schema.get('target', frame.columns[-1])
    if target not in frame.columns:
        raise IngestError(f"Target column {target!r} not found in {path}")
    drop = set(schema.get('drop', []))
    features = [c for c in frame.columns if c != target and c not in drop]
    declared_numeric = set(schema.get('numeric', []))
    for name in declared_numeric | set(declared_categorical):
        if name not in frame.columns:
            raise IngestError(f"Schema column {name!r} not found in {path}")

    spec = PreprocessingSpec(target=target, features=features)
    columns = []
    for name in features:
        if name in declared_numeric or (name not in declared_categorical
                                        and pd.api.types.is_numeric_dtype(frame[name])):
            values, mean, std = _encode_numeric(frame, name)
            spec.numeric[name] = (mean, std)
        else:
            values, categories = _encode_categorical(frame, name)
            spec.categorical[name] = categories
        columns.append(values)

    y, classes = _encode_target(frame, target, task)
    spec.target_classes = classes
    X = np.column_stack(columns) if columns else np.zeros((len(frame), 0))
    logger.info(f"Ingested {X.shape[0]} rows with {len(spec.numeric)} numeric and "
                f"{len(spec.categorical)} categorical features from {path}")
    return TabularDataset(X=X, y=y, spec=spec, task=task)
