"""
Logging Configuration
Sets up logging for coopsolve runs.
"""

import logging
import sys
from pathlib import Path


def setup_logging(log_file: str = 'logs/coopsolve.log', log_level: str = 'INFO', quiet: bool = False):
    """
    Setup logging configuration.

    Args:
        log_file: Path to log file
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        quiet: Only warnings and errors reach stdout; the file still gets everything at log_level
    """
    # Create logs directory if it doesn't exist
    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    level = getattr(logging, log_level.upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"Unknown log level: {log_level}")

    console = logging.StreamHandler(sys.stdout)
    if quiet:
        console.setLevel(logging.WARNING)

    # Configure logging
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            console
        ],
        force=True
    )

    # Create logger
    logger = logging.getLogger()
    logger.info(f"Logging initialized - Level: {log_level}, File: {log_file}")

    return logger
