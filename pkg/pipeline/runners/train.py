"""
Train Runner
Trains a payoff network, or the multinomial baseline, on a dataset file.
"""

import logging
from argparse import Namespace

from coopsolve import MlpArchitecture, PayoffModel, TrainConfig, train, train_multinomial
from coopsolve.dataset_io import read_dataset, write_model
from pipeline.writers import ArtifactWriter

from .common import banner, parse_int_list

logger = logging.getLogger(__name__)


def train_config(args: Namespace, layout: str) -> TrainConfig:
    base = TrainConfig.variable() if layout == 'variable' else TrainConfig.fixed()
    return TrainConfig(
        max_epochs=args.max_epochs or base.max_epochs,
        baseline_epochs=args.baseline_epochs,
        patience=args.patience,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        runs=args.runs,
        seed=args.seed,
        n_jobs=args.threads,
    )


def run_train(args: Namespace, writer: ArtifactWriter) -> PayoffModel:
    """
    Train a model on --data and write the model file.

    Args:
        args: Parsed train arguments
        writer: Artifact writer of the run

    Returns:
        The trained model
    """
    banner("TRAINING")
    dataset = read_dataset(args.data)
    meta = dataset.metadata
    logger.info(f"Loaded {len(dataset)} {meta.layout} {meta.concept} games from {args.data}")
    cfg = train_config(args, meta.layout)

    if args.baseline == 'multinomial':
        model = train_multinomial(dataset, cfg)
        summary = {'baseline': 'multinomial'}
    else:
        arch = MlpArchitecture(
            input_dim=dataset.n_features,
            payoff_dim=dataset.n_features,
            hidden=tuple(parse_int_list(args.hidden)) if args.hidden else (),
            dropout=args.dropout,
            epsilon_head=meta.has_epsilon,
        )
        model, curve = train(dataset, arch, cfg)
        summary = {'epochs_run': curve.epochs_run, 'best_epoch': curve.best_epoch,
                   'best_validation_loss': curve.best_loss, 'stopped_early': curve.stopped_early}

    default_name = f"model_{meta.concept}_{meta.layout}_n{meta.max_players}.json"
    with writer.artifact(args.output or default_name, summary={**summary, 'config': cfg.to_dict()}) as path:
        write_model(model, path)
    return model
