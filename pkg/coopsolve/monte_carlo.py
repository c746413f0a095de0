"""
Monte-Carlo Module
Permutation-sampling Shapley estimates and subset-sampling Banzhaf estimates.

Every resample draws from its own child of SeedSequence(seed), so estimates
are identical regardless of how many workers run the resamples.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .errors import DegenerateGameError
from .games import CharacteristicFn, SolutionVector, WeightedVotingGame, ensure_solvable

logger = logging.getLogger(__name__)

PERMUTATION_CHUNK = 64


@dataclass(frozen=True)
class McConfig:
    """Sampling budget: `permutations` per resample, `resamples` independent repeats."""

    permutations: int = 1000
    resamples: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.permutations < 1:
            raise ValueError(f"permutations must be >= 1, got {self.permutations}")
        if self.resamples < 1:
            raise ValueError(f"resamples must be >= 1, got {self.resamples}")

    def seed_sequences(self) -> List[np.random.SeedSequence]:
        return np.random.SeedSequence(self.seed).spawn(self.resamples)

    def with_seed(self, seed: int) -> 'McConfig':
        return McConfig(self.permutations, self.resamples, seed)


def sample_permutations(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """`count` independent uniform permutations of 0..n-1 (Fisher-Yates per row)."""
    return rng.permuted(np.tile(np.arange(n), (count, 1)), axis=1)


def _wvg_resample(game: WeightedVotingGame, permutations: int,
                  seed: np.random.SeedSequence) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    perms = sample_permutations(rng, permutations, game.n)
    prefix = np.cumsum(game.weights[perms], axis=1)
    pivot_position = np.argmax(game.wins(prefix), axis=1)
    pivots = perms[np.arange(permutations), pivot_position]
    counts = np.bincount(pivots, minlength=game.n).astype(float)
    # Marginals are 0/1, so the sum of squares equals the sum
    return counts, counts


def _fn_resample(fn: CharacteristicFn, permutations: int,
                 seed: np.random.SeedSequence) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    n = fn.n_players
    steps = np.arange(n + 1)[None, :, None]
    sums = np.zeros(n)
    squares = np.zeros(n)
    for start in range(0, permutations, PERMUTATION_CHUNK):
        count = min(PERMUTATION_CHUNK, permutations - start)
        perms = sample_permutations(rng, count, n)
        ranks = np.argsort(perms, axis=1)
        members = ranks[:, None, :] < steps
        values = np.asarray(fn.values(members.reshape(-1, n)), dtype=float).reshape(count, n + 1)
        marginals = np.empty((count, n))
        marginals[np.arange(count)[:, None], perms] = np.diff(values, axis=1)
        sums += marginals.sum(axis=0)
        squares += (marginals ** 2).sum(axis=0)
    return sums, squares


def _run_resamples(worker: Callable, cfg: McConfig, n_jobs: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    seeds = cfg.seed_sequences()
    if n_jobs == 1 or cfg.resamples == 1:
        return [worker(s) for s in seeds]
    return Parallel(n_jobs=n_jobs, prefer='threads')(delayed(worker)(s) for s in seeds)


def _pooled_std_errors(sums: np.ndarray, squares: np.ndarray, total: int) -> np.ndarray:
    mean = sums / total
    variance = np.maximum(squares / total - mean ** 2, 0.0)
    if total > 1:
        variance *= total / (total - 1)
    return np.sqrt(variance / total)


def shapley_mc(game: Union[WeightedVotingGame, CharacteristicFn], cfg: McConfig = None,
               n_jobs: int = 1) -> SolutionVector:
    """
    Estimate Shapley values by sampling permutations.

    Args:
        game: Weighted voting game (v(N)=1 required) or any characteristic function
        cfg: Sampling budget and seed
        n_jobs: Parallel workers over resamples

    Returns:
        SolutionVector of estimates with per-player standard errors
    """
    cfg = cfg or McConfig()
    if isinstance(game, WeightedVotingGame):
        ensure_solvable(game)

        def worker(seed):
            return _wvg_resample(game, cfg.permutations, seed)
    else:
        def worker(seed):
            return _fn_resample(game, cfg.permutations, seed)

    results = _run_resamples(worker, cfg, n_jobs)
    estimates = np.mean([sums / cfg.permutations for sums, _ in results], axis=0)
    total = cfg.permutations * cfg.resamples
    std_errors = _pooled_std_errors(
        np.sum([s for s, _ in results], axis=0), np.sum([q for _, q in results], axis=0), total
    )
    logger.debug(f"Shapley MC with {total} permutations, max std-error {std_errors.max():.2e}")
    return SolutionVector(estimates, std_errors=std_errors, meta={
        'concept': 'shapley', 'method': 'mc',
        'permutations': cfg.permutations, 'resamples': cfg.resamples, 'seed': cfg.seed,
    })


def _banzhaf_resample(game: WeightedVotingGame, samples: int,
                      seed: np.random.SeedSequence) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    subsets = rng.random((samples, game.n)) < 0.5
    sums = subsets.astype(float) @ game.weights
    swings = np.zeros(game.n)
    for i in range(game.n):
        without = sums - subsets[:, i] * game.weights[i]
        swings[i] = np.count_nonzero(game.wins(without + game.weights[i]) & ~game.wins(without))
    return swings, swings


def banzhaf_mc(game: WeightedVotingGame, cfg: McConfig = None, normalized: bool = False,
               n_jobs: int = 1) -> SolutionVector:
    """
    Estimate Banzhaf indices by sampling subsets of the other players uniformly.

    Args:
        game: Game with v(N)=1
        cfg: `permutations` is used as the number of sampled subsets per resample
        normalized: Divide the estimates by their sum
        n_jobs: Parallel workers over resamples

    Returns:
        SolutionVector of raw (default) or normalized estimates with standard errors
    """
    cfg = cfg or McConfig()
    ensure_solvable(game)

    results = _run_resamples(lambda seed: _banzhaf_resample(game, cfg.permutations, seed), cfg, n_jobs)
    estimates = np.mean([swings / cfg.permutations for swings, _ in results], axis=0)
    total = cfg.permutations * cfg.resamples
    std_errors = _pooled_std_errors(
        np.sum([s for s, _ in results], axis=0), np.sum([q for _, q in results], axis=0), total
    )
    if normalized:
        scale = float(estimates.sum())
        if scale == 0.0:
            raise DegenerateGameError(f"No swing was sampled for {game}")
        estimates = estimates / scale
        std_errors = std_errors / scale
    return SolutionVector(estimates, std_errors=std_errors, meta={
        'concept': 'banzhaf', 'method': 'mc', 'normalized': normalized,
        'permutations': cfg.permutations, 'resamples': cfg.resamples, 'seed': cfg.seed,
    })
