"""
Generate Runner
Samples weighted voting games and labels them with ground truth.
"""

import logging
from argparse import Namespace

from coopsolve import GameDataset, make_fixed_dataset, make_variable_dataset
from coopsolve.dataset_io import write_dataset
from pipeline.writers import ArtifactWriter

from .common import banner, build_api, parse_int_list

logger = logging.getLogger(__name__)


def run_generate(args: Namespace, writer: ArtifactWriter, batch_size: int = 500) -> GameDataset:
    """
    Generate a fixed-size (--n) or variable-size (--n-list) dataset.

    Args:
        args: Parsed gen arguments
        writer: Artifact writer of the run
        batch_size: Games per logged batch

    Returns:
        The GameDataset
    """
    banner("DATASET GENERATION")
    api = build_api(args)
    common = dict(concept=args.concept, seed=args.seed, api=api, canonical=args.canonical,
                  batch_size=batch_size, n_jobs=args.threads)

    if args.n_list:
        n_list = parse_int_list(args.n_list)
        max_players = args.max_players or max(n_list)
        dataset = make_variable_dataset(n_list, args.games, max_players, dist=args.dist, **common)
        default_name = f"{args.concept}_variable_{min(n_list)}-{max(n_list)}.csv"
    else:
        if args.n is None:
            raise ValueError("gen needs --n or --n-list")
        dataset = make_fixed_dataset(args.n, args.games, dist=args.dist, **common)
        default_name = f"{args.concept}_n{args.n}.csv"

    with writer.artifact(args.output or default_name, summary={
        'games': len(dataset), 'label_methods': list(dataset.metadata.label_methods),
        'regenerated': dataset.metadata.regenerated,
    }) as path:
        write_dataset(dataset, path)
    return dataset
