"""
Run Manifests
JSON record written next to every CLI output so a run can be replayed exactly.
"""

import json
import logging
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src import __version__
from src.data_loader import atomic_write_text
from src.errors import TensorIOError, TensorParseError

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = '.manifest.json'


@dataclass
class RunManifest:
    """Resolved parameters, paths and timing of one CLI invocation."""
    subcommand: str
    params: Dict[str, Any]
    argv: List[str]
    seed: Optional[int] = None
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    wall_clock_seconds: float = 0.0
    version: str = __version__
    python: str = field(default_factory=platform.python_version)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, path: Path) -> Path:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + '\n'
        atomic_write_text(path, text)
        logger.debug(f"Manifest written to {path}")
        return Path(path)


def manifest_path(output_path: Path) -> Path:
    """``out.tns`` -> ``out.manifest.json``; prefixes without a suffix get it appended."""
    output_path = Path(output_path)
    stem = output_path.name[:-len(output_path.suffix)] if output_path.suffix else output_path.name
    return output_path.with_name(stem + MANIFEST_SUFFIX)


def load_manifest(path: Path) -> RunManifest:
    path = Path(path)
    if not path.exists():
        raise TensorIOError(f"File not found: {path}")
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise TensorParseError(f"Invalid manifest JSON: {e.msg}", e.lineno, str(path))
    try:
        return RunManifest(**data)
    except TypeError as e:
        raise TensorParseError(f"Manifest fields do not match: {e}", None, str(path))
