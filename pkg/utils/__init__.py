"""
Utilities Package
Helper functions and utilities for coopsolve runs.
"""

from .logging_config import setup_logging
from .run_state import RunStateManager

__all__ = ['RunStateManager', 'setup_logging']
