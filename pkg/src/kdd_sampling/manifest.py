"""Run manifests: inputs, outputs, seeds, versions and wall time of a CLI run."""

from __future__ import annotations

import hashlib
import logging
import platform
import time
from datetime import UTC, datetime
from importlib import metadata
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from ._version import __version__
from .const import MANIFEST_FORMAT_TAG

_LOGGER = logging.getLogger(__name__)

_TRACKED = ("numpy", "scipy", "pydantic")


class FileRecord(BaseModel):
    """A file read or written by a run."""

    path: str
    sha256: str


class RunManifest(BaseModel):
    """Everything needed to repeat a run."""

    format: str = MANIFEST_FORMAT_TAG
    command: str
    arguments: dict[str, Any] = Field(default_factory=dict)
    inputs: list[FileRecord] = Field(default_factory=list)
    outputs: list[FileRecord] = Field(default_factory=list)
    seeds: dict[str, int] = Field(default_factory=dict)
    versions: dict[str, str] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    started_at: str
    wall_time: float = 0.0


def file_digest(path: Path | str) -> str:
    """SHA-256 of a file's contents."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def runtime_versions() -> dict[str, str]:
    """Versions of Python, this package and its numerical dependencies."""
    versions = {"python": platform.python_version(), "kdd-sampling": __version__}
    for name in _TRACKED:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class RunRecorder:
    """Collects a manifest while a command runs."""

    def __init__(self, command: str, arguments: dict[str, Any]) -> None:
        """Start recording.

        Args:
            command: CLI subcommand name.
            arguments: Parsed command-line arguments.
        """
        self._start = time.perf_counter()
        self.manifest = RunManifest(
            command=command,
            arguments={key: _plain(value) for key, value in arguments.items()},
            versions=runtime_versions(),
            started_at=datetime.now(UTC).isoformat(),
        )

    def add_input(self, path: Path | str) -> None:
        """Record an input file and its digest."""
        self.manifest.inputs.append(FileRecord(path=str(path), sha256=file_digest(path)))

    def add_output(self, path: Path | str) -> None:
        """Record an output file and its digest."""
        self.manifest.outputs.append(FileRecord(path=str(path), sha256=file_digest(path)))

    def add_seed(self, name: str, seed: int) -> None:
        """Record a seed."""
        self.manifest.seeds[name] = seed

    def add_result(self, name: str, value: Any) -> None:
        """Record a scalar result."""
        self.manifest.results[name] = _plain(value)

    def write(self, path: Path | str) -> Path:
        """Stamp the wall time and write the manifest as JSON."""
        self.manifest.wall_time = time.perf_counter() - self._start
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        _LOGGER.debug("Wrote manifest %s", target)
        return target


def _plain(value: Any) -> Any:
    """JSON-friendly form of an argument value."""
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, np.generic):
        return value.item()
    return value
