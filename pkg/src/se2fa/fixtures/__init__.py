"""Access to bundled fixture files (reference dataset, matrix, corpus)."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

__all__ = ["fixture_path"]


def fixture_path(*parts: str) -> Path:
    """Resolve a file under the installed fixtures directory."""
    node = files(__name__)
    for part in parts:
        node = node / part
    return Path(str(node))
