"""
Config Package
Configuration management for coopsolve runs.
"""

from .config import Config

__all__ = ['Config']
