"""
XAI Runner
Ingest, fit the target model, attribute every row, then run the
training-fraction sweep and the speedup measurement.
"""

import json
import logging
from argparse import Namespace
from pathlib import Path
from typing import Dict

from coopsolve import McConfig
from coopsolve.dataset_io import write_model
from coopsolve.xai import (
    build_attribution_dataset,
    distillation_architecture,
    distillation_config,
    fit_target_model,
    fraction_sweep,
    ingest,
    sweep_frame,
    timed_distillation,
)
from pipeline.writers import ArtifactWriter, versioned_path

from .common import banner, parse_float_list, parse_int_list

logger = logging.getLogger(__name__)


def _schema(args: Namespace) -> Dict:
    schema = {}
    if args.schema:
        with open(args.schema, 'r') as f:
            schema = json.load(f)
    if args.target:
        schema['target'] = args.target
    if args.task:
        schema['task'] = args.task
    return schema


def run_xai(args: Namespace, writer: ArtifactWriter, batch_size: int = 500) -> Dict:
    """
    Run the attribution pipeline on --data.

    Args:
        args: Parsed xai arguments
        writer: Artifact writer of the run
        batch_size: Rows per attribution batch

    Returns:
        Dictionary with the sweep points and the speedup report
    """
    banner("INGEST")
    ds = ingest(args.data, _schema(args))
    model = fit_target_model(ds, seed=args.seed, max_depth=args.max_depth, n_trees=args.trees)

    banner("ATTRIBUTION")
    cfg = McConfig(permutations=args.permutations, resamples=args.resamples, seed=args.seed)
    requested = writer.resolve(args.output or 'attributions.csv')
    if args.resume:
        target, version = requested, 1
    else:
        target, version = versioned_path(requested)
    matrix = build_attribution_dataset(ds, model, args.background, cfg, path=target,
                                       batch_size=batch_size, n_jobs=args.threads, progress=args.progress)
    writer.finalize(target, version, summary={
        'rows': len(matrix), 'resumed_rows': matrix.resumed_rows,
        'target_model': model.to_dict(), 'preprocessing': ds.spec.to_dict(),
    })

    banner("DISTILLATION")
    arch = distillation_architecture(ds.n_features, parse_int_list(args.hidden), args.dropout)
    train_cfg = distillation_config(seed=args.seed, epochs=args.epochs)
    fractions = parse_float_list(args.fractions) if args.fractions else None
    points = fraction_sweep(matrix.X, matrix.phi, fractions, arch, train_cfg)

    network, report = timed_distillation(matrix.X, matrix.phi, matrix.seconds, args.speedup_fraction,
                                         arch, train_cfg)
    print(f"Speedup at t={args.speedup_fraction}: {report.speedup:.2f}x, distilled MSE {report.distilled_mse}")

    stem = Path(target).stem
    writer.write_csv(f"{stem}_fractions.csv", sweep_frame(points))
    result = {
        'fractions': [vars(p) for p in points],
        'speedup': report.to_dict(),
        'target_model': model.to_dict(),
        'preprocessing': ds.spec.to_dict(),
    }
    writer.write_json(f"{stem}_sweep.json", result, summary={'speedup': report.speedup})
    network.metadata['features'] = ds.feature_names
    with writer.artifact(f"{stem}_distilled.json") as path:
        write_model(network, path)
    return result
