"""
Runner Helpers
Builds solver objects and parses list-valued arguments shared by the runners.
"""

import json
import logging
from argparse import Namespace
from typing import List

from coopsolve import McConfig, SolverAPI, WeightedVotingGame
from coopsolve.errors import InvalidGameError
from coopsolve.games import parse_weights

logger = logging.getLogger(__name__)


def banner(title: str):
    logger.info("\n" + "=" * 80)
    logger.info(title)
    logger.info("=" * 80)


def mc_config(args: Namespace) -> McConfig:
    return McConfig(permutations=args.permutations, resamples=args.resamples, seed=args.seed)


def build_api(args: Namespace) -> SolverAPI:
    """SolverAPI from the global solver flags."""
    return SolverAPI(
        cap=args.cap,
        naive_cap=args.naive_cap,
        row_cap=args.row_cap,
        mc_threshold=args.mc_threshold,
        mc_config=mc_config(args),
        n_jobs=args.threads,
        tol=args.tolerance,
    )


def parse_int_list(text: str) -> List[int]:
    """'4,5,6' or '4-6' to [4, 5, 6]."""
    values = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        if '-' in part:
            low, high = part.split('-', 1)
            values.extend(range(int(low), int(high) + 1))
        else:
            values.append(int(part))
    if not values:
        raise ValueError(f"Empty integer list: '{text}'")
    return values


def parse_float_list(text: str) -> List[float]:
    return [float(part) for part in text.split(',') if part.strip()]


def load_game(args: Namespace) -> WeightedVotingGame:
    """Game from --game FILE or --weights/--quota."""
    if getattr(args, 'game', None):
        with open(args.game, 'r') as f:
            try:
                return WeightedVotingGame.from_dict(json.load(f))
            except json.JSONDecodeError as e:
                raise InvalidGameError(f"{args.game} is not a JSON game literal: {e}") from e
    if args.weights is None or args.quota is None:
        raise InvalidGameError("Give either --game FILE or both --weights and --quota")
    return WeightedVotingGame(parse_weights(args.weights), args.quota)
