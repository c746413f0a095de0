"""
Runners Package
One driver per CLI command.
"""

from .case_eu import run_case_eu
from .evaluate import run_evaluate
from .generate import run_generate
from .solve import run_solve
from .sweep import run_sweep
from .train import run_train
from .xai import run_xai

__all__ = [
    'run_case_eu',
    'run_evaluate',
    'run_generate',
    'run_solve',
    'run_sweep',
    'run_train',
    'run_xai',
]
