"""
Dataset Generation Module
Samples weighted voting games and labels them with solution concepts,
in fixed-size and zero-padded variable-size layouts.

Every row draws from its own generator seeded with (seed, stream, n, row),
so rows can be generated in any order or in parallel with identical results.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .api import Concept, SolverAPI
from .errors import CoopSolveError, GenerationError
from .games import SolutionVector, WeightedVotingGame, normalize_weights

logger = logging.getLogger(__name__)

DATASET_SCHEMA_VERSION = 1
MAX_QUOTA_ATTEMPTS = 1000
MAX_LABEL_ATTEMPTS = 100

# Generator streams
TRAIN_STREAM = 0
EVAL_STREAM = 1

WIDTH_NOTE = (
    "test distributions use width 2n-1 above their location, the length of the training interval [1, 2n], "
    "not a literal width of 2n"
)


@dataclass(frozen=True)
class WeightDistribution:
    """Weights are drawn as location + width * Beta(alpha, beta)."""

    alpha: float = 1.0
    beta: float = 1.0
    location: float = 1.0
    width: float = 1.0
    name: str = 'custom'

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise GenerationError(f"Beta shape parameters must be positive, got ({self.alpha}, {self.beta})")
        if not np.isfinite(self.width) or self.width <= 0:
            raise GenerationError(f"Support width must be positive, got {self.width}")
        if not np.isfinite(self.location) or self.location < 0:
            raise GenerationError(f"Support location must be non-negative, got {self.location}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.location + self.width * rng.beta(self.alpha, self.beta, size=n)

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> 'WeightDistribution':
        return cls(**data)


# name -> (alpha, beta, location as a function of n)
TEST_DISTRIBUTIONS: Dict[str, Tuple[float, float, Callable[[int], float]]] = {
    'in-sample': (1.0, 1.0, lambda n: 1.0),
    'out-of-sample': (1.0, 1.0, lambda n: 2.5 * n),
    'slight-ood': (8.0, 12.0, lambda n: 2.0),
    'moderate-ood': (7.0, 1.5, lambda n: 1.5 * n),
    'significant-ood': (12.0, 8.0, lambda n: 3.0 * n),
}

DistributionSpec = Union[WeightDistribution, str, Callable[[int], WeightDistribution], None]


def training_distribution(n: int) -> WeightDistribution:
    """Uniform weights on [1, 2n]."""
    return WeightDistribution(1.0, 1.0, 1.0, 2.0 * n - 1.0, name='training')


def test_distribution(name: str, n: int) -> WeightDistribution:
    """
    One of the five evaluation distributions.

    Args:
        name: in-sample, out-of-sample, slight-ood, moderate-ood or significant-ood
        n: Number of players (locations and width scale with n)

    Returns:
        WeightDistribution
    """
    if name not in TEST_DISTRIBUTIONS:
        raise GenerationError(f"Unknown test distribution '{name}'; expected one of {sorted(TEST_DISTRIBUTIONS)}")
    alpha, beta, location = TEST_DISTRIBUTIONS[name]
    return WeightDistribution(alpha, beta, location(n), 2.0 * n - 1.0, name=name)


def resolve_distribution(dist: DistributionSpec, n: int) -> WeightDistribution:
    if dist is None:
        return training_distribution(n)
    if isinstance(dist, WeightDistribution):
        return dist
    if isinstance(dist, str):
        return training_distribution(n) if dist == 'training' else test_distribution(dist, n)
    return dist(n)


def quota_mean(n: int) -> float:
    return 0.25 * (2 * n + 1) * n


def quota_std(n: int) -> float:
    return float(np.sqrt(2.0 * n))


def row_generator(seed: int, stream: int, n: int, row: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, n, row])


def sample_wvg(n: int, dist: DistributionSpec = None,
               seed: Union[int, np.random.Generator] = 0) -> WeightedVotingGame:
    """
    Sample a weighted voting game whose grand coalition wins.

    Args:
        n: Number of players (>= 2)
        dist: Weight distribution (default: training distribution for n)
        seed: Integer seed or an existing Generator

    Returns:
        WeightedVotingGame with 0 < q <= sum(w)
    """
    if n < 2:
        raise GenerationError(f"Games need at least 2 players, got {n}")
    dist = resolve_distribution(dist, n)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    weights = dist.sample(rng, n)
    for _ in range(MAX_QUOTA_ATTEMPTS):
        quota = rng.normal(quota_mean(n), quota_std(n))
        if quota <= 0:
            continue
        game = WeightedVotingGame(weights, quota)
        if game.grand_coalition_wins:
            return game
    raise GenerationError(
        f"No valid quota after {MAX_QUOTA_ATTEMPTS} draws for n={n} and {dist}"
    )


def sample_games(n: int, count: int, dist: DistributionSpec = None, seed: int = 0,
                 stream: int = EVAL_STREAM) -> List[WeightedVotingGame]:
    """`count` games with per-row generators, as used for evaluation sets."""
    return [sample_wvg(n, dist, row_generator(seed, stream, n, row)) for row in range(count)]


@dataclass(frozen=True)
class DatasetMetadata:
    concept: str
    layout: str
    players: Tuple[int, ...]
    max_players: int
    games: int
    seed: int
    distributions: Dict[str, Dict]
    label_methods: Tuple[str, ...]
    canonical: bool = False
    regenerated: int = 0
    normalized_banzhaf: bool = True
    schema_version: int = DATASET_SCHEMA_VERSION
    notes: Tuple[str, ...] = (WIDTH_NOTE,)

    @property
    def has_epsilon(self) -> bool:
        return self.concept == Concept.LEASTCORE.value

    def to_dict(self) -> Dict:
        data = asdict(self)
        for key in ('players', 'label_methods', 'notes'):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'DatasetMetadata':
        data = dict(data)
        for key in ('players', 'label_methods', 'notes'):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


@dataclass(frozen=True, eq=False)
class GameDataset:
    """Normalized-weight features paired with solution labels."""

    features: np.ndarray
    labels: np.ndarray
    metadata: DatasetMetadata

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=float)
        if features.ndim != 2 or labels.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise GenerationError(f"Feature/label shapes {features.shape} and {labels.shape} do not align")
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)

    def __len__(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_outputs(self) -> int:
        return int(self.labels.shape[1])

    @property
    def payoff_labels(self) -> np.ndarray:
        return self.labels[:, :self.n_features]

    @property
    def epsilon_labels(self) -> Optional[np.ndarray]:
        return self.labels[:, self.n_features] if self.metadata.has_epsilon else None

    def player_mask(self) -> np.ndarray:
        """Positions holding real players (weights are strictly positive under every distribution here)."""
        return self.features != 0.0


@dataclass
class _Row:
    features: np.ndarray
    labels: np.ndarray
    method: str
    retries: int = 0


def label_game(game: WeightedVotingGame, concept: Union[Concept, str], api: SolverAPI = None,
               canonical: bool = False, mc_seed: int = 0) -> SolutionVector:
    """Ground-truth label of one game; sampled labels draw from `mc_seed`."""
    api = api or SolverAPI()
    return api.ground_truth(game, Concept(concept), canonical=canonical,
                            mc_config=api.mc_config.with_seed(mc_seed))


def _generate_row(api: SolverAPI, n: int, width: int, dist: WeightDistribution, concept: Concept,
                  canonical: bool, shuffle: bool, seed: int, row: int) -> _Row:
    rng = row_generator(seed, TRAIN_STREAM, n, row)
    retries = 0
    while True:
        game = sample_wvg(n, dist, rng)
        try:
            solution = label_game(game, concept, api, canonical, int(rng.integers(2 ** 63)))
            break
        except CoopSolveError as e:
            retries += 1
            logger.warning(f"Labeling failed for row {row} (n={n}), regenerating: {e}")
            if retries >= MAX_LABEL_ATTEMPTS:
                raise GenerationError(f"Row {row} (n={n}) failed labeling {retries} times") from e

    positions = rng.permutation(width)[:n] if shuffle else np.arange(n)
    features = np.zeros(width)
    labels = np.zeros(width + (1 if concept.has_epsilon else 0))
    features[positions] = normalize_weights(game)
    labels[positions] = solution.payoffs
    if concept.has_epsilon:
        labels[width] = solution.lcv
    return _Row(features, labels, solution.meta.get('method', 'exact'), retries)


def _generate_block(api: SolverAPI, n: int, count: int, width: int, dist: WeightDistribution,
                    concept: Concept, canonical: bool, shuffle: bool, seed: int,
                    batch_size: int, n_jobs: int) -> List[_Row]:
    rows = []
    for start in range(0, count, batch_size):
        stop = min(start + batch_size, count)
        logger.info(f"Generating games batch: {start} to {stop} (n={n})")
        args = (api, n, width, dist, concept, canonical, shuffle, seed)
        if n_jobs == 1:
            rows.extend(_generate_row(*args, row) for row in range(start, stop))
        else:
            rows.extend(Parallel(n_jobs=n_jobs)(delayed(_generate_row)(*args, row) for row in range(start, stop)))
    return rows


def _assemble(rows: List[_Row], metadata_fields: Dict) -> GameDataset:
    methods = tuple(sorted({r.method for r in rows}))
    metadata = DatasetMetadata(
        label_methods=methods,
        regenerated=sum(r.retries for r in rows),
        games=len(rows),
        **metadata_fields,
    )
    features = np.vstack([r.features for r in rows]) if rows else np.zeros((0, metadata.max_players))
    labels = np.vstack([r.labels for r in rows]) if rows else np.zeros((0, metadata.max_players))
    logger.info(f"Dataset ready: {len(rows)} games, labels by {', '.join(methods) or 'none'}, "
                f"{metadata.regenerated} rows regenerated")
    return GameDataset(features, labels, metadata)


def make_fixed_dataset(n: int, games: int, concept: Union[Concept, str],
                       dist: DistributionSpec = None, seed: int = 0,
                       api: SolverAPI = None, canonical: bool = False,
                       batch_size: int = 500, n_jobs: int = 1) -> GameDataset:
    """
    Fixed-size dataset of `games` n-player games.

    Args:
        n: Number of players
        games: Number of rows G
        concept: shapley, banzhaf (normalized labels) or leastcore (epsilon in column n)
        dist: Weight distribution (default: training distribution)
        seed: Generator seed
        api: Solver API providing ground-truth labels
        canonical: Least-core labels use the canonical representative
        batch_size: Rows per logged batch
        n_jobs: Parallel workers

    Returns:
        GameDataset with G x n features and G x K labels
    """
    concept = Concept(concept)
    api = api or SolverAPI()
    distribution = resolve_distribution(dist, n)
    logger.info(f"Generating {games} fixed-size {concept.value} games with n={n}")
    rows = _generate_block(api, n, games, n, distribution, concept, canonical, False,
                           seed, batch_size, n_jobs)
    return _assemble(rows, dict(
        concept=concept.value, layout='fixed', players=(n,), max_players=n, seed=seed,
        distributions={str(n): distribution.to_dict()}, canonical=canonical,
    ))


def make_variable_dataset(n_list: Sequence[int], games_per_n: int, max_players: int,
                          concept: Union[Concept, str], dist: DistributionSpec = None,
                          seed: int = 0, api: SolverAPI = None, canonical: bool = False,
                          batch_size: int = 500, n_jobs: int = 1) -> GameDataset:
    """
    Variable-size dataset zero-padded to `max_players` columns.

    Real players sit at uniformly shuffled positions with their labels moved
    identically; the least-core epsilon always occupies the final column.

    Args:
        n_list: Player counts to include
        games_per_n: Rows per player count
        max_players: Padded width M
        concept: Solution concept
        dist: Weight distribution, or a factory n -> distribution (default: training)
        seed: Generator seed
        api: Solver API providing ground-truth labels
        canonical: Least-core labels use the canonical representative
        batch_size: Rows per logged batch
        n_jobs: Parallel workers

    Returns:
        GameDataset with G x M features
    """
    concept = Concept(concept)
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list:
        raise GenerationError("n_list is empty")
    if n_list[-1] > max_players:
        raise GenerationError(f"max(n_list)={n_list[-1]} exceeds the padded width M={max_players}")
    api = api or SolverAPI()

    rows, distributions = [], {}
    for n in n_list:
        distribution = resolve_distribution(dist, n)
        distributions[str(n)] = distribution.to_dict()
        logger.info(f"Generating {games_per_n} variable-size {concept.value} games with n={n}, M={max_players}")
        rows.extend(_generate_block(api, n, games_per_n, max_players, distribution, concept,
                                    canonical, True, seed, batch_size, n_jobs))
    return _assemble(rows, dict(
        concept=concept.value, layout='variable', players=tuple(n_list), max_players=max_players,
        seed=seed, distributions=distributions, canonical=canonical,
    ))
