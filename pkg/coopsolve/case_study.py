"""
EU Council Case Study
Compares trained models with exact solutions on the four-state council game
and, for variable-size models, on the full twenty-state council.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import pandas as pd

from .api import Concept, SolverAPI
from .errors import MissingModelError
from .evaluation import mae
from .games import WeightedVotingGame
from .neural import PayoffModel, predict_payoffs

logger = logging.getLogger(__name__)

EU_STATES = (
    ('Germany', 29), ('France', 29), ('UK', 29), ('Italy', 29),
    ('Spain', 27), ('Poland', 27), ('Romania', 14), ('Netherlands', 13),
    ('Greece', 12), ('Portugal', 12), ('Belgium', 12), ('Czech Rep.', 12),
    ('Hungary', 12), ('Sweden', 10), ('Austria', 10), ('Bulgaria', 10),
    ('Denmark', 7), ('Slovakia', 7), ('Finland', 7), ('Ireland', 7),
)

EU4_STATES = ('Hungary', 'Netherlands', 'Poland', 'Ireland')
EU4_WEIGHTS = (12.0, 13.0, 27.0, 7.0)
EU4_QUOTA = 30.5


def majority_quota(weights) -> float:
    """Half the total weight plus one."""
    return float(sum(weights)) / 2.0 + 1.0


def eu4_game() -> WeightedVotingGame:
    return WeightedVotingGame(EU4_WEIGHTS, EU4_QUOTA)


def eu_council_game() -> WeightedVotingGame:
    weights = [w for _, w in EU_STATES]
    return WeightedVotingGame(weights, majority_quota(weights))


@dataclass
class CaseStudyReport:
    rows: List[Dict] = field(default_factory=list)
    summary: List[Dict] = field(default_factory=list)
    missing: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def mean_mae(self, game: str, concept: str) -> Optional[float]:
        for entry in self.summary:
            if entry['game'] == game and entry['concept'] == concept:
                return entry['mean_mae']
        return None

    def to_dict(self) -> Dict:
        return {'summary': self.summary, 'missing': self.missing, 'rows': self.rows}


def _compare(report: CaseStudyReport, label: str, states, game: WeightedVotingGame,
             concept: Concept, model: PayoffModel, api: SolverAPI, shapley_method: str = 'auto'):
    if concept is Concept.SHAPLEY:
        truth = api.solve(game, concept, shapley_method)
    else:
        truth = api.ground_truth(game, concept)
    prediction = predict_payoffs(model, game)
    for state, t, p in zip(states, truth.payoffs, prediction.payoffs):
        report.rows.append({
            'game': label, 'concept': concept.value, 'state': state,
            'truth': float(t), 'prediction': float(p), 'abs_error': float(abs(t - p)),
        })
    entry = {
        'game': label,
        'concept': concept.value,
        'mean_mae': mae(truth.payoffs, prediction.payoffs),
        'truth_method': truth.meta.get('method'),
    }
    if concept is Concept.LEASTCORE:
        entry['truth_lcv'] = truth.lcv
        entry['predicted_lcv'] = prediction.lcv
    report.summary.append(entry)
    logger.info(f"{label} {concept.value}: mean MAE {entry['mean_mae']:.4f} (truth by {entry['truth_method']})")


def eu_case_study(fixed_models: Mapping[str, PayoffModel] = None,
                  variable_models: Mapping[str, PayoffModel] = None,
                  api: SolverAPI = None,
                  council_shapley: str = 'mc') -> CaseStudyReport:
    """
    Compare model predictions with ground truth on the EU council games.

    Args:
        fixed_models: Fixed n=4 models keyed by concept
        variable_models: Variable-size models keyed by concept
        api: Solver API for the ground truth
        council_shapley: Shapley method for the twenty-state council (mc or exact)

    Returns:
        CaseStudyReport with a per-state table and per-concept mean MAE
    """
    fixed_models = dict(fixed_models or {})
    variable_models = dict(variable_models or {})
    if not fixed_models and not variable_models:
        raise MissingModelError("The EU case study needs at least one trained model")
    api = api or SolverAPI()
    report = CaseStudyReport()

    four, council = eu4_game(), eu_council_game()
    council_states = [name for name, _ in EU_STATES]
    for concept in Concept:
        fixed = fixed_models.get(concept.value)
        variable = variable_models.get(concept.value)
        if fixed is not None:
            _compare(report, 'eu4-fixed', EU4_STATES, four, concept, fixed, api)
        else:
            report.missing.append(f"eu4-fixed/{concept.value}")
        if variable is not None:
            _compare(report, 'eu4-variable', EU4_STATES, four, concept, variable, api)
            if variable.architecture.input_dim >= council.n:
                _compare(report, 'eu20-variable', council_states, council, concept, variable, api,
                         shapley_method=council_shapley)
            else:
                logger.warning(f"Variable {concept.value} model holds {variable.architecture.input_dim} "
                               f"players; skipping the {council.n}-state council")
                report.missing.append(f"eu20-variable/{concept.value}")
        else:
            report.missing.append(f"eu4-variable/{concept.value}")
            report.missing.append(f"eu20-variable/{concept.value}")
    return report
