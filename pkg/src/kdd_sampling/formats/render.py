"""PGM map rendering and CSV tables."""

from __future__ import annotations

import csv
import json
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import NDArray

from ..const import PRODUCER
from ..exceptions import KddFormatError, KddValidationError


class Window(NamedTuple):
    """Linear display window mapping ``low`` to 0 and ``high`` to 255."""

    low: float
    high: float


def to_gray(array: NDArray[Any], window: Window) -> NDArray[np.uint8]:
    """Map values to 8-bit gray with round-half-up: floor((v - low)/(high - low)·255 + 0.5).

    Values outside the window saturate. A degenerate window maps everything
    to mid-gray (128).
    """
    values = np.asarray(array, dtype=np.float64)
    span = window.high - window.low
    if span <= 0:
        return np.full(values.shape, 128, dtype=np.uint8)
    scaled = np.floor((values - window.low) / span * 255.0 + 0.5)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def sidecar_path(path: Path | str) -> Path:
    """JSON sidecar written next to a rendered map."""
    target = Path(path)
    return target.with_name(target.name + ".json")


def emit_map(
    array: NDArray[Any],
    path: Path | str,
    window: Window | None = None,
) -> Window:
    """Render a 2-D real map as a binary 8-bit PGM with a JSON sidecar.

    The sidecar records the window, the array minimum and maximum, the shape
    and the rounding rule.

    Args:
        array: 2-D real values; rows become image rows.
        path: PGM output path.
        window: Display window; the data range when omitted.

    Returns:
        The window used.

    Raises:
        KddValidationError: If ``array`` is not 2-D or not finite.
    """
    values = np.asarray(array)
    if values.ndim != 2:
        raise KddValidationError(f"Only 2-D maps can be rendered, got shape {values.shape}")
    if np.iscomplexobj(values) or not np.all(np.isfinite(values)):
        raise KddValidationError("Rendered maps must be real and finite")
    low, high = float(values.min()), float(values.max())
    used = window or Window(low, high)

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    rows, columns = values.shape
    header = f"P5\n{columns} {rows}\n255\n".encode("ascii")
    target.write_bytes(header + to_gray(values, used).tobytes())
    sidecar = {
        "producer": PRODUCER,
        "window": [used.low, used.high],
        "min": low,
        "max": high,
        "shape": [rows, columns],
        "rounding": "round-half-up",
    }
    sidecar_path(target).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return used


def read_pgm(path: Path | str) -> NDArray[np.uint8]:
    """Read a binary 8-bit PGM written by :func:`emit_map`.

    Raises:
        KddFormatError: If the file is not such a PGM.
    """
    source = Path(path)
    data = source.read_bytes()
    parts = data.split(maxsplit=4)
    if len(parts) < 4 or parts[0] != b"P5" or parts[3] != b"255":
        raise KddFormatError("Not an 8-bit binary PGM", path=source)
    columns, rows = int(parts[1]), int(parts[2])
    pixels = data[len(data) - rows * columns :]
    if len(pixels) != rows * columns:
        raise KddFormatError("PGM payload is truncated", path=source)
    return np.frombuffer(pixels, dtype=np.uint8).reshape(rows, columns).copy()


def emit_csv(table: Sequence[Mapping[str, Any]], path: Path | str) -> Path:
    """Write rows as RFC-4180 CSV; the columns follow the first row's keys.

    Raises:
        KddValidationError: If the table is empty.
    """
    if not table:
        raise KddValidationError("Cannot write an empty table")
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(table[0]), lineterminator="\r\n")
        writer.writeheader()
        writer.writerows(table)
    return target
