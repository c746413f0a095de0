"""
Configuration Module
Manages solver limits, sampling budgets and output locations.
Every value may be overridden via environment variables (.env file).
"""

import os
from typing import Any, Dict
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Configuration class for coopsolve runs."""

    # Parallelism
    THREADS = int(os.getenv('COOPSOLVE_THREADS', str(os.cpu_count() or 1)))

    # Solver limits
    ENUMERATION_CAP = int(os.getenv('COOPSOLVE_ENUMERATION_CAP', '24'))
    NAIVE_LP_CAP = int(os.getenv('COOPSOLVE_NAIVE_LP_CAP', '14'))
    LP_ROW_CAP = int(os.getenv('COOPSOLVE_LP_ROW_CAP', '20000'))
    TOLERANCE = float(os.getenv('COOPSOLVE_TOLERANCE', '1e-9'))
    EVAL_TOLERANCE = float(os.getenv('COOPSOLVE_EVAL_TOLERANCE', '1e-6'))

    # Monte-Carlo
    MC_PERMUTATIONS = int(os.getenv('COOPSOLVE_MC_PERMUTATIONS', '1000'))
    MC_RESAMPLES = int(os.getenv('COOPSOLVE_MC_RESAMPLES', '10'))
    MC_THRESHOLD = int(os.getenv('COOPSOLVE_MC_THRESHOLD', '24'))

    # Run Configuration
    OUTPUT_DIR = os.getenv('COOPSOLVE_OUTPUT_DIR', 'output')
    STATE_FILE = os.getenv('COOPSOLVE_STATE_FILE', 'run_state.json')
    BATCH_SIZE = int(os.getenv('BATCH_SIZE', '500'))
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', 'logs/coopsolve.log')

    @classmethod
    def get_solver_config(cls) -> Dict[str, Any]:
        """Get SolverAPI keyword arguments."""
        return {
            'cap': cls.ENUMERATION_CAP,
            'naive_cap': cls.NAIVE_LP_CAP,
            'row_cap': cls.LP_ROW_CAP,
            'mc_threshold': cls.MC_THRESHOLD,
            'tol': cls.TOLERANCE,
        }

    @classmethod
    def get_mc_config(cls) -> Dict[str, int]:
        """Get the default Monte-Carlo budget."""
        return {
            'permutations': cls.MC_PERMUTATIONS,
            'resamples': cls.MC_RESAMPLES,
        }
