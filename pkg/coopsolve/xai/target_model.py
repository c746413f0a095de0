"""
Target Model
The model whose predictions are explained: a CART tree by default, a
bootstrap random forest when more than one tree is requested.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from sklearn.ensemble import RandomForestClassifier, RandomForestRegressor
from sklearn.metrics import accuracy_score, mean_squared_error
from sklearn.model_selection import train_test_split
from sklearn.tree import DecisionTreeClassifier, DecisionTreeRegressor

from ..errors import DimensionError, ModelInputError
from .preprocessing import TASKS, TabularDataset

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class TargetModel:
    estimator: Any
    task: str
    n_features: int
    train_score: float
    test_score: Optional[float] = None
    train_rows: int = 0
    test_rows: int = 0
    positive_class: float = 1.0
    config: Dict = field(default_factory=dict)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """
        Real-valued predictions; classifiers return the positive-class probability.

        Args:
            X: (rows, features) matrix

        Returns:
            (rows,) predictions
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionError(f"Model expects {self.n_features} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise ModelInputError("Feature matrix contains non-finite values")
        if self.task == 'classification':
            return self._positive_probability(X)
        return self.estimator.predict(X).astype(float)

    def _positive_probability(self, X: np.ndarray) -> np.ndarray:
        classes = np.asarray(self.estimator.classes_, dtype=float)
        column = np.flatnonzero(classes == self.positive_class)
        if column.size == 0:
            # positive class never seen in training
            return np.zeros(X.shape[0])
        return self.estimator.predict_proba(X)[:, column[0]].astype(float)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.predict(X)

    @property
    def score_name(self) -> str:
        return 'accuracy' if self.task == 'classification' else 'mse'

    def to_dict(self) -> Dict:
        return {
            'task': self.task,
            'estimator': type(self.estimator).__name__,
            'n_features': self.n_features,
            'positive_class': self.positive_class,
            self.score_name: {'train': self.train_score, 'test': self.test_score},
            'train_rows': self.train_rows,
            'test_rows': self.test_rows,
            'config': self.config,
        }


def _make_estimator(task: str, seed: int, max_depth: Optional[int], n_trees: int):
    if n_trees > 1:
        forest = RandomForestClassifier if task == 'classification' else RandomForestRegressor
        return forest(n_estimators=n_trees, max_depth=max_depth, bootstrap=True, random_state=seed)
    if task == 'classification':
        return DecisionTreeClassifier(criterion='gini', max_depth=max_depth, random_state=seed)
    return DecisionTreeRegressor(criterion='squared_error', max_depth=max_depth, random_state=seed)


def _positive_code(ds: TabularDataset) -> float:
    """Code of the last sorted class; binary targets use 1 even when only one class occurs."""
    classes = ds.spec.target_classes or []
    return float(max(1, len(classes) - 1))


def _score(task: str, y_true: np.ndarray, y_pred: np.ndarray) -> float:
    if task == 'classification':
        return float(accuracy_score(y_true, y_pred))
    return float(mean_squared_error(y_true, y_pred))


def fit_target_model(ds: TabularDataset, task: str = None, seed: int = 0,
                     max_depth: Optional[int] = None, n_trees: int = 1,
                     test_fraction: float = 0.2) -> TargetModel:
    """
    Fit the model to be explained.

    Args:
        ds: Ingested dataset
        task: regression or classification (default: the dataset's task)
        seed: Seed for the split and the estimator
        max_depth: Tree depth limit (None grows until pure)
        n_trees: 1 for a single CART, more for a bootstrap random forest
        test_fraction: Held-out share of rows used for the reported test score (0 to train on all)

    Returns:
        Fitted TargetModel
    """
    task = task or ds.task
    if task not in TASKS:
        raise ValueError(f"Unknown task {task!r}; expected one of {', '.join(TASKS)}")
    if ds.n_rows < 2:
        raise DimensionError(f"Fitting a target model needs at least 2 rows, got {ds.n_rows}")
    if n_trees < 1:
        raise ValueError(f"n_trees must be at least 1, got {n_trees}")

    if 0.0 < test_fraction < 1.0:
        X_train, X_test, y_train, y_test = train_test_split(
            ds.X, ds.y, test_size=test_fraction, random_state=seed
        )
    else:
        X_train, X_test, y_train, y_test = ds.X, ds.X[:0], ds.y, ds.y[:0]

    estimator = _make_estimator(task, seed, max_depth, n_trees)
    estimator.fit(X_train, y_train)
    model = TargetModel(
        estimator=estimator,
        task=task,
        n_features=ds.n_features,
        train_score=_score(task, y_train, estimator.predict(X_train)),
        test_score=_score(task, y_test, estimator.predict(X_test)) if len(y_test) else None,
        train_rows=int(len(y_train)),
        test_rows=int(len(y_test)),
        positive_class=_positive_code(ds),
        config={'seed': seed, 'max_depth': max_depth, 'n_trees': n_trees, 'test_fraction': test_fraction},
    )
    logger.info(f"Fitted {type(estimator).__name__} on {model.train_rows} rows: "
                f"train {model.score_name} {model.train_score:.6g}"
                + (f", test {model.score_name} {model.test_score:.6g}" if model.test_score is not None else ""))
    return model
