"""
Run State Manager
Tracks artifacts written by past runs (versions, seeds, counts).
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

logger = logging.getLogger(__name__)


class RunStateManager:
    """Manages the JSON state file shared by all CLI commands."""

    def __init__(self, state_file: str = 'output/run_state.json'):
        """
        Initialize state manager.

        Args:
            state_file: Path to state file
        """
        self.state_file = Path(state_file)
        self.state = self._load_state()

    def _load_state(self) -> Dict[str, Any]:
        """Load state from file."""
        if self.state_file.exists():
            try:
                with open(self.state_file, 'r') as f:
                    return json.load(f)
            except Exception as e:
                logger.warning(f"Failed to load state file: {e}")
                return {}
        return {}

    def save_state(self):
        """Save current state to file."""
        try:
            self.state_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.state_file, 'w') as f:
                json.dump(self.state, f, indent=2, sort_keys=True)
            logger.info(f"State saved to {self.state_file}")
        except Exception as e:
            logger.error(f"Failed to save state: {e}")

    def record_artifact(self, command: str, path: str, version: int, seed: int = None):
        """
        Remember an artifact written by a command.

        Args:
            command: CLI command that wrote it
            path: Artifact path
            version: 1 for the requested name, 2+ for .vN names
            seed: Seed used for the run
        """
        artifacts = self.state.setdefault('artifacts', [])
        artifacts.append({'command': command, 'path': str(path), 'version': version, 'seed': seed})
        runs = self.state.setdefault('runs', {})
        runs[command] = runs.get(command, 0) + 1
        self.state['last_artifact'] = str(path)

    def artifacts(self, command: str = None) -> List[Dict[str, Any]]:
        """Artifacts recorded so far, optionally for one command."""
        entries = self.state.get('artifacts', [])
        return [e for e in entries if command is None or e['command'] == command]

    def get(self, key: str, default: Any = None) -> Any:
        """Get value from state."""
        return self.state.get(key, default)

    def set(self, key: str, value: Any):
        """Set value in state."""
        self.state[key] = value

    def update(self, data: Dict[str, Any]):
        """Update state with dictionary."""
        self.state.update(data)
