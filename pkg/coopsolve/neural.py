"""
Neural Payoff Module
Feedforward networks written directly in numpy: forward pass, backpropagation,
Adam, dropout, early stopping and payoff prediction for weighted voting games.

Layer l maps activations a -> a @ W[l] + b[l]; hidden layers use ReLU with
inverted dropout at train time. The last layer feeds a softmax (or linear)
payoff head over the first `payoff_dim` outputs and an optional sigmoid
epsilon head on one extra output.
"""

import copy
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from .errors import DimensionError, ModelInputError, TrainingError
from .games import SolutionVector, WeightedVotingGame, normalize_weights

logger = logging.getLogger(__name__)

MODEL_SCHEMA_VERSION = 1
OUTPUT_HEADS = ('softmax', 'linear')

# Generator streams per training run
SPLIT_STREAM = 0
INIT_STREAM = 1
SHUFFLE_STREAM = 2


@dataclass(frozen=True)
class MlpArchitecture:
    input_dim: int
    payoff_dim: int
    hidden: Tuple[int, ...] = (128, 128, 128)
    dropout: float = 0.1
    epsilon_head: bool = False
    output: str = 'softmax'

    def __post_init__(self):
        object.__setattr__(self, 'hidden', tuple(int(h) for h in self.hidden))
        if self.input_dim < 1 or self.payoff_dim < 1 or any(h < 1 for h in self.hidden):
            raise DimensionError(f"All layer widths must be >= 1: {self.layer_sizes}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"Dropout must lie in [0, 1), got {self.dropout}")
        if self.output not in OUTPUT_HEADS:
            raise ValueError(f"Unknown output head '{self.output}'; expected one of {OUTPUT_HEADS}")

    @property
    def output_dim(self) -> int:
        return self.payoff_dim + (1 if self.epsilon_head else 0)

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_dim, *self.hidden, self.output_dim]

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['hidden'] = list(self.hidden)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'MlpArchitecture':
        return cls(**data)


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 6000
    baseline_epochs: int = 500
    patience: int = 75
    train_fraction: float = 0.7
    learning_rate: float = 1e-4
    adam_eps: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    weight_decay: float = 0.0
    batch_size: Optional[int] = 128
    runs: int = 1
    seed: int = 0
    early_stopping: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.max_epochs < 1 or self.runs < 1:
            raise ValueError("max_epochs and runs must be >= 1")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1 or None, got {self.batch_size}")

    @classmethod
    def fixed(cls, **overrides) -> 'TrainConfig':
        return cls(**{'max_epochs': 6000, **overrides})

    @classmethod
    def variable(cls, **overrides) -> 'TrainConfig':
        return cls(**{'max_epochs': 15000, **overrides})

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(eq=False)
class PayoffModel:
    """Network parameters plus training metadata."""

    architecture: MlpArchitecture
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        sizes = self.architecture.layer_sizes
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise DimensionError(f"Expected {len(sizes) - 1} layers, got {len(self.weights)}")
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[layer], sizes[layer + 1]) or b.shape != (sizes[layer + 1],):
                raise DimensionError(
                    f"Layer {layer} has shapes {w.shape}/{b.shape}, "
                    f"expected {(sizes[layer], sizes[layer + 1])}/{(sizes[layer + 1],)}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ModelInputError(f"Layer {layer} has non-finite parameters")

    @classmethod
    def initialize(cls, architecture: MlpArchitecture, rng: np.random.Generator,
                   metadata: Dict = None) -> 'PayoffModel':
        """Kaiming-uniform weights for ReLU layers, Glorot-uniform for the output layer, zero biases."""
        sizes = architecture.layer_sizes
        weights, biases = [], []
        for layer in range(len(sizes) - 1):
            fan_in, fan_out = sizes[layer], sizes[layer + 1]
            if layer < len(sizes) - 2:
                bound = np.sqrt(6.0 / fan_in)
            else:
                bound = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(architecture, weights, biases, dict(metadata or {}))

    @property
    def layout(self) -> str:
        return self.metadata.get('layout', 'fixed')

    @property
    def n_parameters(self) -> int:
        return int(sum(w.size + b.size for w, b in zip(self.weights, self.biases)))

    def parameters(self) -> List[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self) -> 'PayoffModel':
        return PayoffModel(self.architecture, [w.copy() for w in self.weights],
                           [b.copy() for b in self.biases], copy.deepcopy(self.metadata))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return forward(self, X)

    def to_dict(self) -> Dict:
        return {
            'schema_version': MODEL_SCHEMA_VERSION,
            'architecture': self.architecture.to_dict(),
            'layers': [
                {'shape': list(w.shape), 'weights': w.ravel(order='C').tolist(), 'bias': b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'PayoffModel':
        version = data.get('schema_version')
        if version != MODEL_SCHEMA_VERSION:
            raise ModelInputError(f"Unsupported model schema version {version}")
        architecture = MlpArchitecture.from_dict(data['architecture'])
        weights = [np.asarray(layer['weights'], dtype=float).reshape(layer['shape']) for layer in data['layers']]
        biases = [np.asarray(layer['bias'], dtype=float) for layer in data['layers']]
        return cls(architecture, weights, biases, dict(data.get('metadata', {})))


@dataclass
class TrainingCurve:
    train_loss: List[float] = field(default_factory=list)
    validation_loss: List[float] = field(default_factory=list)
    best_validation_loss: List[float] = field(default_factory=list)
    best_epoch: int = -1
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.train_loss)

    @property
    def best_loss(self) -> float:
        return self.best_validation_loss[-1] if self.best_validation_loss else float('nan')

    def to_dict(self) -> Dict:
        return {**asdict(self), 'epochs_run': self.epochs_run}


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _check_input(model: PayoffModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != model.architecture.input_dim:
        raise DimensionError(f"Model expects {model.architecture.input_dim} inputs, got {X.shape[-1]}")
    if not np.all(np.isfinite(X)):
        raise ModelInputError("Model input contains non-finite values")
    return X


def _forward(model: PayoffModel, X: np.ndarray, train: bool,
             rng: Optional[np.random.Generator]) -> Tuple[np.ndarray, List]:
    arch = model.architecture
    cache = []
    a = X
    for W, b in zip(model.weights[:-1], model.biases[:-1]):
        z = a @ W + b
        h = np.maximum(z, 0.0)
        mask = None
        if train and arch.dropout > 0.0:
            mask = (rng.random(h.shape) >= arch.dropout) / (1.0 - arch.dropout)
            h = h * mask
        cache.append((a, z, mask))
        a = h
    logits = a @ model.weights[-1] + model.biases[-1]
    cache.append((a, logits, None))

    K = arch.payoff_dim
    payoff = softmax(logits[:, :K]) if arch.output == 'softmax' else logits[:, :K]
    if arch.epsilon_head:
        return np.hstack([payoff, sigmoid(logits[:, K:])]), cache
    return payoff, cache


def forward(model: PayoffModel, x: np.ndarray, train_mode: bool = False,
            rng: np.random.Generator = None) -> np.ndarray:
    """
    Run the network on one feature vector or a batch of rows.

    Args:
        model: PayoffModel
        x: Vector of length input_dim or (k, input_dim) matrix
        train_mode: Apply dropout
        rng: Dropout generator (train mode only)

    Returns:
        Outputs with the same leading shape as x: payoffs, then epsilon if present
    """
    X = _check_input(model, x)
    single = X.ndim == 1
    if train_mode and rng is None:
        rng = np.random.default_rng(0)
    outputs, _ = _forward(model, np.atleast_2d(X), train_mode, rng)
    return outputs[0] if single else outputs


def mse_loss(outputs: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean((outputs - targets) ** 2))


def backward(model: PayoffModel, outputs: np.ndarray, targets: np.ndarray,
             cache: List) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    Gradients of the mean squared error over every output entry.

    Args:
        model: The model that produced `outputs`
        outputs: Network outputs from `_forward`
        targets: Label rows
        cache: Layer cache from `_forward`

    Returns:
        (weight gradients, bias gradients) per layer
    """
    arch = model.architecture
    K = arch.payoff_dim
    d_out = 2.0 * (outputs - targets) / outputs.size

    d_logits = np.empty_like(d_out)
    if arch.output == 'softmax':
        p = outputs[:, :K]
        g = d_out[:, :K]
        d_logits[:, :K] = p * (g - np.sum(g * p, axis=1, keepdims=True))
    else:
        d_logits[:, :K] = d_out[:, :K]
    if arch.epsilon_head:
        s = outputs[:, K:]
        d_logits[:, K:] = d_out[:, K:] * s * (1.0 - s)

    n_layers = len(model.weights)
    grad_w = [None] * n_layers
    grad_b = [None] * n_layers
    delta = d_logits
    for layer in range(n_layers - 1, -1, -1):
        a_in = cache[layer][0]
        grad_w[layer] = a_in.T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if layer == 0:
            break
        _, z, mask = cache[layer - 1]
        delta = delta @ model.weights[layer].T
        if mask is not None:
            delta = delta * mask
        delta = delta * (z > 0.0)
    return grad_w, grad_b


class AdamOptimizer:
    """Adam with optional L2 weight decay added to the gradient."""

    def __init__(self, params: Sequence[np.ndarray], learning_rate: float = 1e-4,
                 betas: Tuple[float, float] = (0.9, 0.999), eps: float = 1e-5,
                 weight_decay: float = 0.0):
        self.learning_rate = learning_rate
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]):
        """Update `params` in place."""
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            if self.weight_decay:
                g = g + self.weight_decay * p
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / c1) / (np.sqrt(v / c2) + self.eps)

    @classmethod
    def from_config(cls, params: Sequence[np.ndarray], cfg: TrainConfig) -> 'AdamOptimizer':
        return cls(params, cfg.learning_rate, (cfg.beta1, cfg.beta2), cfg.adam_eps, cfg.weight_decay)


def fit_network(model: PayoffModel, X: np.ndarray, Y: np.ndarray, cfg: TrainConfig,
                rng: np.random.Generator, epochs: int = None,
                X_val: np.ndarray = None, Y_val: np.ndarray = None) -> TrainingCurve:
    """
    Train `model` in place with mini-batch Adam.

    With a validation set the parameters of the best validation epoch are
    restored at the end, and early stopping applies after the baseline epochs.

    Args:
        model: Model to train
        X: Training inputs
        Y: Training targets
        cfg: Optimizer, batching and early-stopping settings
        rng: Generator for shuffling and dropout
        epochs: Epoch count (default cfg.max_epochs)
        X_val: Optional validation inputs
        Y_val: Optional validation targets

    Returns:
        TrainingCurve
    """
    X = _check_input(model, X)
    Y = np.asarray(Y, dtype=float)
    if Y.shape != (X.shape[0], model.architecture.output_dim):
        raise DimensionError(f"Targets have shape {Y.shape}, expected {(X.shape[0], model.architecture.output_dim)}")
    epochs = epochs or cfg.max_epochs
    params = model.parameters()
    optimizer = AdamOptimizer.from_config(params, cfg)
    batch = cfg.batch_size or X.shape[0]
    validate = X_val is not None and len(X_val) > 0

    curve = TrainingCurve()
    best_loss = np.inf
    best_params = None
    since_best = 0

    for epoch in range(epochs):
        order = rng.permutation(X.shape[0])
        total = 0.0
        for start in range(0, X.shape[0], batch):
            idx = order[start:start + batch]
            outputs, cache = _forward(model, X[idx], True, rng)
            total += mse_loss(outputs, Y[idx]) * idx.size
            grad_w, grad_b = backward(model, outputs, Y[idx], cache)
            optimizer.step(params, [g for pair in zip(grad_w, grad_b) for g in pair])
        train_loss = total / X.shape[0]
        if not np.isfinite(train_loss):
            raise TrainingError(f"Training loss became non-finite at epoch {epoch}", epoch=epoch)
        curve.train_loss.append(train_loss)

        if not validate:
            continue
        val_loss = mse_loss(forward(model, X_val), Y_val)
        if not np.isfinite(val_loss):
            raise TrainingError(f"Validation loss became non-finite at epoch {epoch}", epoch=epoch)
        curve.validation_loss.append(val_loss)
        if val_loss < best_loss:
            best_loss = val_loss
            best_params = [p.copy() for p in params]
            curve.best_epoch = epoch
            since_best = 0
        else:
            since_best += 1
        curve.best_validation_loss.append(best_loss)

        if (epoch + 1) % 100 == 0:
            logger.debug(f"Epoch {epoch + 1}: train {train_loss:.6g}, validation {val_loss:.6g}, best {best_loss:.6g}")
        if cfg.early_stopping and epoch + 1 >= cfg.baseline_epochs and since_best >= cfg.patience:
            curve.stopped_early = True
            logger.info(f"Early stopping at epoch {epoch + 1} (best epoch {curve.best_epoch + 1})")
            break

    if best_params is not None:
        for p, best in zip(params, best_params):
            p[...] = best
    return curve


def split_indices(rows: int, train_fraction: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Shuffled train/validation index split with at least one row on each side."""
    if rows < 2:
        raise TrainingError("Need at least 2 rows to split into training and validation sets")
    order = rng.permutation(rows)
    n_train = min(max(int(round(rows * train_fraction)), 1), rows - 1)
    return order[:n_train], order[n_train:]


def default_architecture(dataset, hidden: Sequence[int] = (128, 128, 128),
                         dropout: float = 0.1) -> MlpArchitecture:
    return MlpArchitecture(
        input_dim=dataset.n_features,
        payoff_dim=dataset.n_features,
        hidden=tuple(hidden),
        dropout=dropout,
        epsilon_head=dataset.metadata.has_epsilon,
    )


def _train_run(arch: MlpArchitecture, cfg: TrainConfig, run: int, X_train, Y_train, X_val, Y_val):
    model = PayoffModel.initialize(arch, np.random.default_rng([cfg.seed, INIT_STREAM, run]))
    curve = fit_network(model, X_train, Y_train, cfg, np.random.default_rng([cfg.seed, SHUFFLE_STREAM, run]),
                        X_val=X_val, Y_val=Y_val)
    logger.info(f"Run {run + 1}/{cfg.runs}: {curve.epochs_run} epochs, best validation loss {curve.best_loss:.6g}")
    return model, curve


def train(dataset, arch: MlpArchitecture = None,
          cfg: TrainConfig = None) -> Tuple[PayoffModel, TrainingCurve]:
    """
    Train a payoff model on a GameDataset.

    Args:
        dataset: GameDataset (fixed or variable layout)
        arch: Network architecture (default: 3 x 128 hidden, dropout 0.1, heads from the dataset)
        cfg: Training configuration

    Returns:
        (model with the best validation loss over cfg.runs runs, its TrainingCurve)
    """
    arch = arch or default_architecture(dataset)
    cfg = cfg or (TrainConfig.variable() if dataset.metadata.layout == 'variable' else TrainConfig.fixed())
    if arch.input_dim != dataset.n_features or arch.output_dim != dataset.n_outputs:
        raise DimensionError(
            f"Architecture {arch.input_dim}->{arch.output_dim} does not match dataset "
            f"{dataset.n_features}->{dataset.n_outputs}"
        )

    train_idx, val_idx = split_indices(len(dataset), cfg.train_fraction,
                                       np.random.default_rng([cfg.seed, SPLIT_STREAM]))
    X, Y = dataset.features, dataset.labels
    args = (X[train_idx], Y[train_idx], X[val_idx], Y[val_idx])
    logger.info(f"Training on {train_idx.size} rows, validating on {val_idx.size} rows, {cfg.runs} run(s)")

    if cfg.n_jobs == 1 or cfg.runs == 1:
        results = [_train_run(arch, cfg, run, *args) for run in range(cfg.runs)]
    else:
        results = Parallel(n_jobs=cfg.n_jobs, prefer='threads')(
            delayed(_train_run)(arch, cfg, run, *args) for run in range(cfg.runs)
        )

    best_run = int(np.argmin([curve.best_loss for _, curve in results]))
    model, curve = results[best_run]
    model.metadata.update({
        'concept': dataset.metadata.concept,
        'layout': dataset.metadata.layout,
        'players': list(dataset.metadata.players),
        'dataset_seed': dataset.metadata.seed,
        'canonical': dataset.metadata.canonical,
        'seed': cfg.seed,
        'run': best_run,
        'runs': cfg.runs,
        'epochs_run': curve.epochs_run,
        'best_epoch': curve.best_epoch,
        'best_validation_loss': curve.best_loss,
        'train_rows': int(train_idx.size),
        'validation_rows': int(val_idx.size),
    })
    return model, curve


def _numeric_loss(model: PayoffModel, X: np.ndarray, Y: np.ndarray) -> float:
    outputs, _ = _forward(model, X, False, None)
    return mse_loss(outputs, Y)


def grad_check(arch: MlpArchitecture, seed: int = 0, h: float = 1e-5, batch: int = 4) -> float:
    """
    Compare backpropagated gradients with central finite differences.

    Dropout is switched off for the check.

    Args:
        arch: Small architecture to check
        seed: Seed for parameters, inputs and targets
        h: Finite-difference step
        batch: Rows in the random check batch

    Returns:
        Maximum relative error over all parameters
    """
    if arch.dropout:
        arch = replace(arch, dropout=0.0)
    rng = np.random.default_rng(seed)
    model = PayoffModel.initialize(arch, rng)
    for b in model.biases:
        b[...] = rng.normal(scale=0.1, size=b.shape)

    X = rng.normal(size=(batch, arch.input_dim))
    if arch.output == 'softmax':
        targets = rng.dirichlet(np.ones(arch.payoff_dim), size=batch)
    else:
        targets = rng.normal(size=(batch, arch.payoff_dim))
    if arch.epsilon_head:
        targets = np.hstack([targets, rng.uniform(size=(batch, 1))])

    outputs, cache = _forward(model, X, False, None)
    grad_w, grad_b = backward(model, outputs, targets, cache)
    analytic = [g for pair in zip(grad_w, grad_b) for g in pair]

    worst = 0.0
    for param, grad in zip(model.parameters(), analytic):
        for idx in np.ndindex(param.shape):
            original = param[idx]
            param[idx] = original + h
            up = _numeric_loss(model, X, targets)
            param[idx] = original - h
            down = _numeric_loss(model, X, targets)
            param[idx] = original
            numeric = (up - down) / (2.0 * h)
            error = abs(grad[idx] - numeric) / max(abs(grad[idx]) + abs(numeric), 1e-6)
            worst = max(worst, error)
    return worst


def _padded_inputs(model: PayoffModel, games: Sequence[WeightedVotingGame]) -> np.ndarray:
    width = model.architecture.input_dim
    X = np.zeros((len(games), width))
    for row, game in enumerate(games):
        if model.layout == 'variable':
            if game.n > width:
                raise ModelInputError(f"Game has {game.n} players but the model holds at most {width}")
        elif game.n != width:
            raise DimensionError(f"Fixed-size model expects {width} players, got {game.n}")
        X[row, :game.n] = normalize_weights(game)
    return X


def _to_solution(model: PayoffModel, game: WeightedVotingGame, output: np.ndarray) -> SolutionVector:
    arch = model.architecture
    payoffs = output[:game.n]
    if model.layout == 'variable':
        mass = float(payoffs.sum())
        if not np.isfinite(mass) or mass <= 0.0:
            raise ModelInputError(f"Model assigned no mass to the {game.n} real players")
        payoffs = payoffs / mass
    lcv = float(output[arch.payoff_dim]) if arch.epsilon_head else None
    return SolutionVector(payoffs, lcv=lcv, meta={
        'concept': model.metadata.get('concept'), 'method': 'model', 'layout': model.layout,
    })


def predict_payoffs(model: PayoffModel, game: WeightedVotingGame) -> SolutionVector:
    """
    Predict a solution for one game.

    Variable-layout models see the normalized weights zero-padded to M; the
    mass placed on padded positions is discarded and the real players'
    payoffs are rescaled to sum to 1. The epsilon output is left as is.

    Args:
        model: Trained PayoffModel
        game: Game to solve

    Returns:
        SolutionVector of predicted payoffs (and lcv for least-core models)
    """
    return predict_many(model, [game])[0]


def predict_many(model: PayoffModel, games: Sequence[WeightedVotingGame]) -> List[SolutionVector]:
    """Batched predict_payoffs."""
    if not games:
        return []
    outputs = forward(model, _padded_inputs(model, games))
    return [_to_solution(model, game, out) for game, out in zip(games, outputs)]
