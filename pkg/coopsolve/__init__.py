"""
Cooperative Game Solver Library
Exact, sampled and LP-based payoff computation for weighted voting games,
synthetic dataset generation and neural payoff models.
"""

from .api import Concept, Method, SolverAPI
from .baselines import LinearPayoffModel, WeightProportional, train_multinomial, weight_proportional
from .case_study import eu4_game, eu_case_study, eu_council_game
from .datagen import (
    DatasetMetadata,
    GameDataset,
    WeightDistribution,
    label_game,
    make_fixed_dataset,
    make_variable_dataset,
    sample_games,
    sample_wvg,
    test_distribution,
    training_distribution,
)
from .dataset_io import read_dataset, read_model, write_dataset, write_model
from .errors import CoopSolveError
from .evaluation import EvalReport, ExactOracle, evaluate_model, mae
from .exact import banzhaf_exact, minimal_winning_coalitions, shapley_exact, winning_coalitions
from .games import Coalition, SolutionVector, WeightedVotingGame, char_value, is_imputation
from .least_core import Formulation, check_feasibility, least_core, max_excess
from .monte_carlo import McConfig, banzhaf_mc, shapley_mc
from .neural import MlpArchitecture, PayoffModel, TrainConfig, grad_check, predict_payoffs, train
from .simplex import LinearProgram, LpSolution, LpStatus, solve_lp
from .sweeps import SweepResult, quota_sweep, weight_sweep

__version__ = "1.0.0"
__all__ = [
    "Concept",
    "Method",
    "SolverAPI",
    "LinearPayoffModel",
    "WeightProportional",
    "train_multinomial",
    "weight_proportional",
    "eu4_game",
    "eu_case_study",
    "eu_council_game",
    "DatasetMetadata",
    "GameDataset",
    "WeightDistribution",
    "label_game",
    "make_fixed_dataset",
    "make_variable_dataset",
    "sample_games",
    "sample_wvg",
    "test_distribution",
    "training_distribution",
    "read_dataset",
    "read_model",
    "write_dataset",
    "write_model",
    "CoopSolveError",
    "EvalReport",
    "ExactOracle",
    "evaluate_model",
    "mae",
    "banzhaf_exact",
    "minimal_winning_coalitions",
    "shapley_exact",
    "winning_coalitions",
    "Coalition",
    "SolutionVector",
    "WeightedVotingGame",
    "char_value",
    "is_imputation",
    "Formulation",
    "check_feasibility",
    "least_core",
    "max_excess",
    "McConfig",
    "banzhaf_mc",
    "shapley_mc",
    "MlpArchitecture",
    "PayoffModel",
    "TrainConfig",
    "grad_check",
    "predict_payoffs",
    "train",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "solve_lp",
    "SweepResult",
    "quota_sweep",
    "weight_sweep",
]
