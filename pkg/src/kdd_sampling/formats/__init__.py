"""File formats: array containers, ASCII pattern and sparse-weight files, PGM and CSV."""

from __future__ import annotations

from .containers import (
    ArrayHeader,
    container_paths,
    load_sensitivity,
    load_weight,
    read_array,
    save_sensitivity,
    save_weight,
    write_array,
)
from .render import Window, emit_csv, emit_map, read_pgm, sidecar_path, to_gray
from .text import read_pattern, read_sparse_weight, write_pattern, write_sparse_weight

__all__ = [
    # Array containers
    "ArrayHeader",
    "container_paths",
    "load_sensitivity",
    "load_weight",
    "read_array",
    "save_sensitivity",
    "save_weight",
    "write_array",
    # Text formats
    "read_pattern",
    "read_sparse_weight",
    "write_pattern",
    "write_sparse_weight",
    # Rendering
    "Window",
    "emit_csv",
    "emit_map",
    "read_pgm",
    "sidecar_path",
    "to_gray",
]
