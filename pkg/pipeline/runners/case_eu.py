"""
EU Case Study Runner
Loads every model file in a directory and compares it with ground truth on
the EU council games.
"""

import logging
from argparse import Namespace
from pathlib import Path
from typing import Dict, Tuple

from coopsolve import PayoffModel, eu_case_study
from coopsolve.case_study import CaseStudyReport
from coopsolve.dataset_io import read_model
from coopsolve.errors import MissingModelError
from pipeline.writers import ArtifactWriter
from pipeline.writers.artifact_writer import MANIFEST_SUFFIX

from .common import banner, build_api

logger = logging.getLogger(__name__)


def load_models(directory: str) -> Tuple[Dict[str, PayoffModel], Dict[str, PayoffModel]]:
    """
    Model files in `directory` keyed by concept, split into fixed n=4 and variable models.
    Later file names win when several models share a key.
    """
    root = Path(directory)
    if not root.is_dir():
        raise MissingModelError(f"Model directory {root} does not exist")
    fixed, variable = {}, {}
    for path in sorted(root.glob('*.json')):
        if path.name.endswith(MANIFEST_SUFFIX):
            continue
        try:
            model = read_model(path)
        except (KeyError, ValueError) as e:
            logger.warning(f"Skipping {path}: not a model file ({e})")
            continue
        concept = model.metadata.get('concept')
        if model.layout == 'variable':
            variable[concept] = model
        elif model.architecture.input_dim == 4:
            fixed[concept] = model
        else:
            logger.warning(f"Skipping {path}: fixed model with {model.architecture.input_dim} players")
            continue
        logger.info(f"Loaded {model.layout} {concept} model from {path}")
    return fixed, variable


def run_case_eu(args: Namespace, writer: ArtifactWriter) -> CaseStudyReport:
    """
    Run the EU case study over the models in --models.

    Args:
        args: Parsed case-eu arguments
        writer: Artifact writer of the run

    Returns:
        The CaseStudyReport
    """
    banner("EU CASE STUDY")
    fixed, variable = load_models(args.models)
    report = eu_case_study(fixed, variable, api=build_api(args), council_shapley=args.council_shapley)
    for entry in report.summary:
        print(f"{entry['game']:<14} {entry['concept']:<10} mean MAE {entry['mean_mae']:.6f}")
    for key in report.missing:
        print(f"{key:<25} no model")
    stem = args.output or 'case_eu'
    writer.write_csv(f"{stem}.csv", report.to_frame(), summary={'summary': report.summary})
    writer.write_json(f"{stem}.json", report.to_dict())
    return report
