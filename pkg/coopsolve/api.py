"""
Solver API Module
Unified interface to the exact, Monte-Carlo and LP solvers.
"""

import logging
from enum import Enum
from typing import Union

from .errors import UnsupportedMethodError
from .exact import banzhaf_exact, shapley_exact
from .games import DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCE, SolutionVector, WeightedVotingGame
from .least_core import DEFAULT_NAIVE_CAP, DEFAULT_ROW_CAP, least_core
from .monte_carlo import McConfig, banzhaf_mc, shapley_mc

logger = logging.getLogger(__name__)

DEFAULT_MC_THRESHOLD = 24


class Concept(str, Enum):
    SHAPLEY = 'shapley'
    BANZHAF = 'banzhaf'
    LEASTCORE = 'leastcore'

    @property
    def has_epsilon(self) -> bool:
        return self is Concept.LEASTCORE


class Method(str, Enum):
    AUTO = 'auto'
    EXACT = 'exact'
    MC = 'mc'
    LP = 'lp'


class SolverAPI:
    """
    Single entry point for every (concept, method) pair.

    Example usage:
        api = SolverAPI(mc_config=McConfig(seed=7))
        phi = api.solve(WeightedVotingGame([49, 49, 2], 50), 'shapley')
        lc = api.solve(game, 'leastcore', canonical=True)
    """

    def __init__(self, cap: int = DEFAULT_ENUMERATION_CAP,
                 naive_cap: int = DEFAULT_NAIVE_CAP,
                 row_cap: int = DEFAULT_ROW_CAP,
                 mc_threshold: int = DEFAULT_MC_THRESHOLD,
                 mc_config: McConfig = None,
                 n_jobs: int = 1,
                 tol: float = DEFAULT_TOLERANCE):
        """
        Initialize solver API.

        Args:
            cap: Enumeration cap on n
            naive_cap: Cap on n for the naive least-core formulation
            row_cap: Largest least-core LP solved without constraint generation
            mc_threshold: Shapley/Banzhaf ground truth switches to MC above this n
            mc_config: Sampling budget for MC methods
            n_jobs: Parallel workers for MC resamples
            tol: Constraint-generation tolerance
        """
        self.cap = cap
        self.naive_cap = naive_cap
        self.row_cap = row_cap
        self.mc_threshold = mc_threshold
        self.mc_config = mc_config or McConfig()
        self.n_jobs = n_jobs
        self.tol = tol

    def resolve_method(self, game: WeightedVotingGame, concept: Union[Concept, str],
                       method: Union[Method, str] = Method.AUTO) -> Method:
        """Concrete method for `concept`; AUTO follows the ground-truth policy."""
        concept, method = Concept(concept), Method(method)
        if concept is Concept.LEASTCORE:
            if method is Method.MC:
                raise UnsupportedMethodError("The least core has no Monte-Carlo method; use 'lp'")
            return Method.LP
        if method is Method.LP:
            raise UnsupportedMethodError(f"{concept.value} has no LP method; use 'exact' or 'mc'")
        if method is Method.AUTO:
            return Method.EXACT if game.n <= min(self.mc_threshold, self.cap) else Method.MC
        return method

    def solve(self, game: WeightedVotingGame, concept: Union[Concept, str],
              method: Union[Method, str] = Method.AUTO,
              normalized: bool = True,
              formulation: str = 'minimal',
              canonical: bool = False,
              mc_config: McConfig = None) -> SolutionVector:
        """
        Solve a game for one solution concept.

        Args:
            game: Game with v(N)=1
            concept: shapley, banzhaf or leastcore
            method: exact, mc, lp or auto
            normalized: Banzhaf only, divide by the index sum
            formulation: Least core only, naive, minimal or incremental
            canonical: Least core only, minimum-variance representative
            mc_config: Overrides the API-level sampling budget

        Returns:
            SolutionVector
        """
        concept = Concept(concept)
        method = self.resolve_method(game, concept, method)
        cfg = mc_config or self.mc_config

        if concept is Concept.LEASTCORE:
            return least_core(game, formulation=formulation, canonical=canonical, cap=self.cap,
                              naive_cap=self.naive_cap, row_cap=self.row_cap, tol=self.tol)
        if concept is Concept.SHAPLEY:
            if method is Method.EXACT:
                return shapley_exact(game, cap=self.cap)
            return shapley_mc(game, cfg, n_jobs=self.n_jobs)
        if method is Method.EXACT:
            return banzhaf_exact(game, normalized=normalized, cap=self.cap)
        return banzhaf_mc(game, cfg, normalized=normalized, n_jobs=self.n_jobs)

    def ground_truth(self, game: WeightedVotingGame, concept: Union[Concept, str],
                     canonical: bool = False, mc_config: McConfig = None) -> SolutionVector:
        """Label used for datasets and evaluation (normalized Banzhaf, raw or canonical least core)."""
        return self.solve(game, concept, Method.AUTO, normalized=True, canonical=canonical,
                          mc_config=mc_config)
