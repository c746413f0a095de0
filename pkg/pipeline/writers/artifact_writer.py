"""
Artifact Writer
Writes command outputs under versioned names, each with a manifest recording
how it was produced.
"""

import json
import logging
import subprocess
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

import numpy as np
import pandas as pd

from utils.run_state import RunStateManager

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
MANIFEST_SUFFIX = '.manifest.json'
PARTIAL_SUFFIX = '.partial'


def versioned_path(path: Path) -> Tuple[Path, int]:
    """
    First free name among path, <stem>.v2<suffix>, <stem>.v3<suffix>, ...

    Args:
        path: Requested path

    Returns:
        Tuple of (free path, version number)
    """
    path = Path(path)
    if not path.exists():
        return path, 1
    version = 2
    while True:
        candidate = path.with_name(f"{path.stem}.v{version}{path.suffix}")
        if not candidate.exists():
            return candidate, version
        version += 1


def manifest_path(path: Path) -> Path:
    return Path(path).with_name(Path(path).name + MANIFEST_SUFFIX)


def git_describe() -> str:
    """`git describe` of the working tree, or 'unknown' outside a repository."""
    try:
        result = subprocess.run(
            ['git', 'describe', '--always', '--dirty', '--tags'],
            capture_output=True, text=True, timeout=10, cwd=Path(__file__).resolve().parent,
        )
    except (OSError, subprocess.SubprocessError):
        return 'unknown'
    return result.stdout.strip() if result.returncode == 0 and result.stdout.strip() else 'unknown'


def resolve_seed(seed: Optional[int]) -> Tuple[int, str]:
    """
    Use the given seed, or derive one from fresh OS entropy.

    Returns:
        Tuple of (seed, source) where source is 'argument' or 'entropy:<value>'
    """
    if seed is not None:
        return int(seed), 'argument'
    entropy = np.random.SeedSequence().entropy
    return int(entropy % (2 ** 32)), f"entropy:{entropy}"


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


class ArtifactWriter:
    """Versioned artifact output for one CLI command."""

    def __init__(self, output_dir: str, command: str, args: Dict[str, Any], seed: int,
                 seed_source: str = 'argument', state: RunStateManager = None, version: str = ''):
        """
        Initialize writer.

        Args:
            output_dir: Directory receiving relative artifact names
            command: CLI command name
            args: Parsed command arguments (recorded in every manifest)
            seed: Resolved seed of the run
            seed_source: Where the seed came from
            state: Run state file receiving artifact records
            version: coopsolve version
        """
        self.output_dir = Path(output_dir)
        self.command = command
        self.args = _jsonable(args)
        self.seed = seed
        self.seed_source = seed_source
        self.state = state
        self.version = version
        self.started = time.perf_counter()
        self.written = []

    def resolve(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() or path.parent != Path('.') else self.output_dir / path

    @contextmanager
    def artifact(self, name: str, summary: Dict[str, Any] = None) -> Iterator[Path]:
        """
        Yield a temporary path to write to; on success it is renamed to the
        first free versioned name and a manifest is written next to it.
        A failed write leaves nothing behind.

        Args:
            name: Requested file name (relative names land in the output directory)
            summary: Extra fields for the manifest
        """
        final, version = versioned_path(self.resolve(name))
        final.parent.mkdir(parents=True, exist_ok=True)
        partial = final.with_name(final.name + PARTIAL_SUFFIX)
        try:
            yield partial
        except BaseException:
            if partial.exists():
                partial.unlink()
                logger.warning(f"Removed incomplete output {partial}")
            raise
        partial.replace(final)
        self.finalize(final, version, summary)

    def finalize(self, path: Path, version: int = 1, summary: Dict[str, Any] = None) -> Path:
        """Write the manifest for a finished artifact and record it in the run state."""
        manifest = {
            'artifact': path.name,
            'command': self.command,
            'args': self.args,
            'seed': self.seed,
            'seed_source': self.seed_source,
            'git': git_describe(),
            'wall_clock_seconds': time.perf_counter() - self.started,
            'coopsolve_version': self.version,
            'artifact_version': version,
        }
        if summary:
            manifest['summary'] = _jsonable(summary)
        with open(manifest_path(path), 'w') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
        if self.state is not None:
            self.state.record_artifact(self.command, str(path), version, self.seed)
            self.state.save_state()
        self.written.append(path)
        logger.info(f"Wrote {path} (version {version})")
        return path

    def write_json(self, name: str, data: Dict[str, Any], summary: Dict[str, Any] = None) -> Path:
        with self.artifact(name, summary) as path:
            with open(path, 'w') as f:
                json.dump(_jsonable(data), f, indent=2, sort_keys=True)
        return self.written[-1]

    def write_csv(self, name: str, frame: pd.DataFrame, summary: Dict[str, Any] = None) -> Path:
        with self.artifact(name, summary) as path:
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        return self.written[-1]
