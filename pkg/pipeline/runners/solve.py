"""
Solve Runner
Computes one solution concept for one game.
"""

import logging
from argparse import Namespace

from coopsolve import Concept, SolutionVector
from pipeline.writers import ArtifactWriter

from .common import banner, build_api, load_game, mc_config

logger = logging.getLogger(__name__)


def format_solution(solution: SolutionVector, digits: int = 10) -> str:
    line = "(" + ", ".join(f"{p:.{digits}g}" for p in solution.payoffs) + ")"
    if solution.lcv is not None:
        line += f"  lcv={solution.lcv:.{digits}g}"
    return line


def run_solve(args: Namespace, writer: ArtifactWriter) -> SolutionVector:
    """
    Solve a game and write the solution record.

    Args:
        args: Parsed solve arguments
        writer: Artifact writer of the run

    Returns:
        The SolutionVector
    """
    banner("SOLVE")
    game = load_game(args)
    concept = Concept(args.concept)
    api = build_api(args)
    method = api.resolve_method(game, concept, args.method)
    logger.info(f"Solving {game} for {concept.value} by {method.value}")

    solution = api.solve(
        game, concept, method,
        normalized=args.normalized,
        formulation=args.formulation,
        canonical=args.canonical,
        mc_config=mc_config(args),
    )
    print(format_solution(solution))

    record = {'game': game.to_dict(), 'concept': concept.value, 'seed': args.seed, **solution.to_dict()}
    writer.write_json(args.output or f"solve_{concept.value}.json", record,
                      summary={'method': method.value, 'players': game.n})
    return solution
