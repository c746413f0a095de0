"""
Evaluate Runner
Scores a model, a baseline or the exact oracle on one test distribution.
"""

import logging
from argparse import Namespace

from coopsolve import Concept, EvalReport, ExactOracle, WeightProportional, evaluate_model
from coopsolve.dataset_io import read_model
from pipeline.writers import ArtifactWriter

from .common import banner, build_api

logger = logging.getLogger(__name__)


def _predictor(args: Namespace, api):
    if args.oracle:
        concept = Concept(args.concept or 'shapley')
        return ExactOracle(concept, api), concept
    if args.baseline == 'weight-proportional':
        return WeightProportional(), Concept(args.concept or 'shapley')
    if not args.model:
        raise ValueError("eval needs --model, --oracle or --baseline")
    model = read_model(args.model)
    concept = Concept(args.concept or model.metadata.get('concept', 'shapley'))
    return model, concept


def run_evaluate(args: Namespace, writer: ArtifactWriter) -> EvalReport:
    """
    Evaluate on --games freshly sampled games from --dist with --n players.

    Args:
        args: Parsed eval arguments
        writer: Artifact writer of the run

    Returns:
        The EvalReport
    """
    banner("EVALUATION")
    api = build_api(args)
    predictor, concept = _predictor(args, api)
    report = evaluate_model(predictor, concept, args.dist, args.n, games_per_n=args.games,
                            seed=args.seed, api=api, compare_canonical=args.compare_canonical,
                            n_jobs=args.threads)
    print(f"{report.model} on {args.dist} (n={args.n}): mean MAE {report.mean_mae:.6f}, "
          f"feasibility {report.feasibility_rate:.3f}")
    writer.write_json(args.output or f"eval_{concept.value}_{args.dist}_n{args.n}.json", report.to_dict(),
                      summary={'mean_mae': report.mean_mae, 'games': report.games})
    return report
