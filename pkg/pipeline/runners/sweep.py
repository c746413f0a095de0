"""
Sweep Runner
Quota and weight perturbation sweeps, optionally against a model.
"""

import logging
from argparse import Namespace

from coopsolve import SweepResult, quota_sweep, weight_sweep
from coopsolve.case_study import eu4_game
from coopsolve.dataset_io import read_model
from coopsolve.games import parse_weights
from pipeline.writers import ArtifactWriter

from .common import banner, build_api, load_game

logger = logging.getLogger(__name__)


def run_sweep(args: Namespace, writer: ArtifactWriter) -> SweepResult:
    """
    Run a --type quota or --type weight sweep and write one CSV row per grid point.

    Args:
        args: Parsed sweep arguments
        writer: Artifact writer of the run

    Returns:
        The SweepResult
    """
    banner(f"{args.type.upper()} SWEEP")
    api = build_api(args)
    predictor = read_model(args.model) if args.model else None

    if args.type == 'quota':
        if args.eu4:
            weights = eu4_game().weights.tolist()
        elif args.weights:
            weights = parse_weights(args.weights)
        else:
            raise ValueError("A quota sweep needs --weights or --eu4")
        result = quota_sweep(weights, args.concept, step=args.step, predictor=predictor, api=api,
                             compare_canonical=args.compare_canonical)
    else:
        game = eu4_game() if args.eu4 else load_game(args)
        result = weight_sweep(game, args.player, args.concept, step=args.step, until=args.until,
                              predictor=predictor, api=api, compare_canonical=args.compare_canonical)

    summary = {
        'points': int(result.grid.size),
        'transitions': result.grid[result.transitions].tolist(),
        'mean_mae': float(result.errors.mean()) if result.errors is not None else None,
    }
    print(f"{result.grid.size} grid points, transitions at {summary['transitions']}")
    writer.write_csv(args.output or f"sweep_{args.type}_{result.concept}.csv", result.to_frame(), summary=summary)
    return result
