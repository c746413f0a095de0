"""
Setup Script
Creates the output and log directories and the .env file of a coopsolve checkout.
"""

import os
import sys
from pathlib import Path
from typing import List


def create_env_file(root: Path = Path('.')) -> bool:
    """
    Copy .env.example to .env unless .env already exists.

    Returns:
        True when a .env file is present afterwards
    """
    env_file = root / '.env'
    env_example = root / '.env.example'
    if env_file.exists():
        print(".env already exists")
        return True
    if not env_example.exists():
        print(".env.example not found; settings fall back to defaults")
        return False
    env_file.write_text(env_example.read_text())
    print("Created .env from .env.example")
    return True


def create_directories(root: Path = Path('.')) -> List[Path]:
    """Create the artifact directory and the log directory; returns the ones created."""
    directories = [
        root / os.getenv('COOPSOLVE_OUTPUT_DIR', 'output'),
        (root / os.getenv('LOG_FILE', 'logs/coopsolve.log')).parent,
    ]
    created = []
    for path in directories:
        if not path.exists():
            path.mkdir(parents=True)
            created.append(path)
            print(f"Created directory: {path}")
    return created


def main() -> int:
    create_directories()
    return 0 if create_env_file() else 1


if __name__ == '__main__':
    sys.exit(main())
