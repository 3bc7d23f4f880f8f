"""ASCII pattern and sparse-weight files."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..const import PATTERN_FORMAT_TAG, SPARSE_WEIGHT_FORMAT_TAG
from ..exceptions import KddFormatError, KddValidationError
from ..grid import GridShape, SamplingPattern
from ..weighting import SparseWeight


def _dims(grid: GridShape) -> tuple[int, int]:
    return (grid.phase_dims[0], grid.phase_dims[1] if grid.ndim == 2 else 1)


def _grid(path: Path, ny: int, nz: int, frames: int) -> GridShape:
    phase_dims = (ny,) if nz == 1 else (ny, nz)
    try:
        return GridShape(phase_dims=phase_dims, frames=frames)
    except ValueError as err:
        raise KddFormatError(f"Invalid grid in header: {err}", path=path) from err


def _header(path: Path, line: str, tag: str, fields: int) -> list[int]:
    tag_parts = tag.split()
    parts = line.split()
    if parts[: len(tag_parts)] != tag_parts or len(parts) != len(tag_parts) + fields:
        raise KddFormatError(f"Expected a '{tag}' header, got {line!r}", path=path)
    try:
        return [int(p) for p in parts[len(tag_parts) :]]
    except ValueError as err:
        raise KddFormatError(f"Malformed header {line!r}", path=path) from err


def _malformed(path: Path, number: int, line: str) -> KddFormatError:
    return KddFormatError(f"Malformed entry on line {number}: {line!r}", path=path)


def write_pattern(path: Path | str, pattern: SamplingPattern) -> Path:
    """Write a pattern as ``ky kz t count`` lines sorted lexicographically.

    1-D grids are written with Nz = 1 and kz = 0.
    """
    target = Path(path)
    ny, nz = _dims(pattern.grid)
    lines = [f"{PATTERN_FORMAT_TAG} {ny} {nz} {pattern.grid.frames}"]
    counts = np.moveaxis(pattern.counts, 0, -1).reshape(ny, nz, pattern.grid.frames)
    for ky, kz, t in np.argwhere(counts > 0):
        lines.append(f"{ky} {kz} {t} {counts[ky, kz, t]}")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n", encoding="ascii")
    return target


def read_pattern(path: Path | str) -> SamplingPattern:
    """Read a pattern file; a header with Nz = 1 yields a 1-D grid.

    Raises:
        FileNotFoundError: If the file does not exist.
        KddFormatError: If the header or an entry is malformed, out of range
            or repeated.
    """
    source = Path(path)
    lines = source.read_text(encoding="ascii").splitlines()
    if not lines:
        raise KddFormatError("Pattern file is empty", path=source)
    ny, nz, frames = _header(source, lines[0], PATTERN_FORMAT_TAG, 3)
    grid = _grid(source, ny, nz, frames)
    counts = np.zeros((ny, nz, frames), dtype=np.int64)

    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            ky, kz, t, count = (int(p) for p in line.split())
        except ValueError as err:
            raise _malformed(source, number, line) from err
        if not (0 <= ky < ny and 0 <= kz < nz and 0 <= t < frames) or count < 1:
            raise KddFormatError(f"Entry out of range on line {number}: {line!r}", path=source)
        if counts[ky, kz, t]:
            raise KddFormatError(f"Repeated entry on line {number}: {line!r}", path=source)
        counts[ky, kz, t] = count

    dense = np.moveaxis(counts, -1, 0).reshape(grid.count_shape)
    return SamplingPattern(grid=grid, counts=dense)


def write_sparse_weight(path: Path | str, w_hat: SparseWeight) -> Path:
    """Write a sparse surrogate as ``dky dkz t t' value`` lines.

    The header carries the grid, the readout length and the entry count;
    values are written with ``repr`` so they read back exactly.
    """
    target = Path(path)
    ny, nz = _dims(w_hat.grid)
    lines = [
        f"{SPARSE_WEIGHT_FORMAT_TAG} {ny} {nz} {w_hat.grid.frames} "
        f"{w_hat.readout_length} {w_hat.support_size}"
    ]
    for offset, t, tp, value in zip(
        w_hat.offsets.tolist(),
        w_hat.frames_t.tolist(),
        w_hat.frames_tp.tolist(),
        w_hat.values.tolist(),
        strict=True,
    ):
        dky, dkz = (offset[0], offset[1] if len(offset) == 2 else 0)
        lines.append(f"{dky} {dkz} {t} {tp} {value!r}")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n", encoding="ascii")
    return target


def read_sparse_weight(path: Path | str) -> SparseWeight:
    """Read a file written by :func:`write_sparse_weight`.

    Raises:
        FileNotFoundError: If the file does not exist.
        KddFormatError: If the file is malformed or its entry count disagrees
            with the header.
    """
    source = Path(path)
    lines = [line for line in source.read_text(encoding="ascii").splitlines() if line.strip()]
    if not lines:
        raise KddFormatError("Sparse weight file is empty", path=source)
    header = _header(source, lines[0], SPARSE_WEIGHT_FORMAT_TAG, 5)
    ny, nz, frames, readout_length, count = header
    grid = _grid(source, ny, nz, frames)
    if len(lines) - 1 != count:
        raise KddFormatError(
            f"Header announces {count} entries, found {len(lines) - 1}", path=source
        )

    offsets, frames_t, frames_tp, values = [], [], [], []
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        try:
            dky, dkz, t, tp = (int(p) for p in parts[:4])
            value = float(parts[4])
        except (ValueError, IndexError) as err:
            raise _malformed(source, number, line) from err
        if len(parts) != 5 or not (0 <= t < frames and 0 <= tp < frames):
            raise _malformed(source, number, line)
        offsets.append([dky % ny, dkz % nz][: grid.ndim])
        frames_t.append(t)
        frames_tp.append(tp)
        values.append(value)

    try:
        return SparseWeight(
            grid=grid,
            offsets=np.asarray(offsets, dtype=np.int64).reshape(count, grid.ndim),
            frames_t=np.asarray(frames_t, dtype=np.int64),
            frames_tp=np.asarray(frames_tp, dtype=np.int64),
            values=np.asarray(values, dtype=np.float64),
            readout_length=readout_length,
        )
    except KddValidationError as err:
        raise KddFormatError(err.message, path=source) from err
