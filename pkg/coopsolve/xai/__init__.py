"""
XAI Package
Feature attributions of tabular models and their distillation into networks.
"""

from .attribution import (
    Attribution,
    AttributionMatrix,
    FeatureGame,
    attribute_instance,
    build_attribution_dataset,
    exact_attribution,
    read_attributions,
    sample_background,
)
from .distillation import (
    DEFAULT_FRACTIONS,
    FractionPoint,
    SpeedupReport,
    distillation_architecture,
    distill,
    distillation_config,
    fraction_sweep,
    measure_speedup,
    speedup_report,
    sweep_frame,
    timed_distillation,
)
from .preprocessing import PreprocessingSpec, TabularDataset, ingest
from .target_model import TargetModel, fit_target_model

__all__ = [
    'Attribution',
    'AttributionMatrix',
    'FeatureGame',
    'attribute_instance',
    'build_attribution_dataset',
    'exact_attribution',
    'read_attributions',
    'sample_background',
    'DEFAULT_FRACTIONS',
    'FractionPoint',
    'SpeedupReport',
    'distillation_architecture',
    'distill',
    'distillation_config',
    'fraction_sweep',
    'measure_speedup',
    'speedup_report',
    'sweep_frame',
    'timed_distillation',
    'PreprocessingSpec',
    'TabularDataset',
    'ingest',
    'TargetModel',
    'fit_target_model',
]
