"""Array container: JSON header plus raw little-endian payload."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..const import (
    ARRAY_DTYPES,
    ARRAY_FORMAT_TAG,
    ARRAY_HEADER_SUFFIX,
    ARRAY_PAYLOAD_SUFFIX,
    READOUT_LABEL,
)
from ..exceptions import KddFormatError
from ..sensitivity import SensitivitySet
from ..weighting import WeightFunction

_LOGGER = logging.getLogger(__name__)


class ArrayHeader(BaseModel):
    """Header of an array container."""

    model_config = {"frozen": True, "extra": "forbid"}

    format: str = ARRAY_FORMAT_TAG
    dims: tuple[int, ...]
    dtype: str
    order: str = "row-major"
    labels: tuple[str, ...] = ()
    metadata: dict[str, Any] = Field(default_factory=dict)

    @field_validator("format")
    @classmethod
    def _check_format(cls, value: str) -> str:
        if value != ARRAY_FORMAT_TAG:
            raise ValueError(f"unsupported container format {value!r}")
        return value

    @field_validator("dtype")
    @classmethod
    def _check_dtype(cls, value: str) -> str:
        if value not in ARRAY_DTYPES:
            raise ValueError(f"unsupported dtype {value!r}")
        return value

    @field_validator("order")
    @classmethod
    def _check_order(cls, value: str) -> str:
        if value != "row-major":
            raise ValueError(f"unsupported order {value!r}")
        return value

    @property
    def payload_size(self) -> int:
        """Expected payload length in bytes."""
        return int(np.prod(self.dims, dtype=np.int64)) * np.dtype(self.dtype).itemsize


def container_paths(base: Path | str) -> tuple[Path, Path]:
    """Header and payload paths of a container; a given suffix is replaced."""
    path = Path(base)
    if path.suffix in (ARRAY_HEADER_SUFFIX, ARRAY_PAYLOAD_SUFFIX):
        path = path.with_suffix("")
    return (
        path.with_name(path.name + ARRAY_HEADER_SUFFIX),
        path.with_name(path.name + ARRAY_PAYLOAD_SUFFIX),
    )


def write_array(
    base: Path | str,
    array: NDArray[Any],
    *,
    labels: tuple[str, ...] = (),
    metadata: dict[str, Any] | None = None,
) -> tuple[Path, Path]:
    """Write ``array`` as a container, preserving its dtype.

    Args:
        base: Container path, with or without suffix.
        array: Data to store.
        labels: Optional axis labels.
        metadata: Extra JSON-serializable fields.

    Returns:
        The header and payload paths.

    Raises:
        KddFormatError: If the dtype is not supported.
    """
    header_path, payload_path = container_paths(base)
    dtype = np.dtype(array.dtype).name
    try:
        header = ArrayHeader(
            dims=tuple(int(n) for n in array.shape),
            dtype=dtype,
            labels=labels,
            metadata=metadata or {},
        )
    except ValidationError as err:
        raise KddFormatError(f"Cannot store array: {err}", path=header_path) from err

    payload = np.ascontiguousarray(array, dtype=np.dtype(dtype).newbyteorder("<"))
    header_path.parent.mkdir(parents=True, exist_ok=True)
    header_path.write_text(header.model_dump_json(indent=2) + "\n", encoding="utf-8")
    payload_path.write_bytes(payload.tobytes(order="C"))
    _LOGGER.debug("Wrote %s array %s to %s", dtype, array.shape, payload_path)
    return header_path, payload_path


def read_array(base: Path | str) -> tuple[NDArray[Any], ArrayHeader]:
    """Read a container written by :func:`write_array`.

    Raises:
        FileNotFoundError: If the header or payload is missing.
        KddFormatError: If the header is invalid or the payload has the wrong size.
    """
    header_path, payload_path = container_paths(base)
    text = header_path.read_text(encoding="utf-8")
    try:
        header = ArrayHeader.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as err:
        raise KddFormatError(f"Invalid container header: {err}", path=header_path) from err

    raw = payload_path.read_bytes()
    if len(raw) != header.payload_size:
        raise KddFormatError(
            f"Payload holds {len(raw)} bytes, header implies {header.payload_size}",
            path=payload_path,
        )
    dtype = np.dtype(header.dtype).newbyteorder("<")
    array = np.frombuffer(raw, dtype=dtype).reshape(header.dims).astype(header.dtype)
    return array, header


def save_sensitivity(base: Path | str, sens: SensitivitySet) -> tuple[Path, Path]:
    """Store a sensitivity set as a complex128 container."""
    spatial = [f"r{i}" for i in range(len(sens.spatial_dims))]
    if sens.readout_axis is not None:
        spatial[sens.readout_axis] = READOUT_LABEL
    return write_array(
        base,
        sens.values,
        labels=("t", "l", "c", *spatial),
        metadata={"readout_axis": sens.readout_axis},
    )


def load_sensitivity(base: Path | str) -> SensitivitySet:
    """Load a sensitivity set; the readout axis is taken from the labels or metadata."""
    array, header = read_array(base)
    readout_axis = header.metadata.get("readout_axis")
    if readout_axis is None and READOUT_LABEL in header.labels:
        readout_axis = header.labels.index(READOUT_LABEL) - 3
    if not np.iscomplexobj(array) and array.dtype.kind != "f":
        raise KddFormatError("Sensitivities must be stored as a float or complex array")
    return SensitivitySet(values=array.astype(np.complex128), readout_axis=readout_axis)


def save_weight(base: Path | str, w: WeightFunction) -> tuple[Path, Path]:
    """Store a weighting function as a float64 container."""
    offsets = [f"dk{i}" for i in range(len(w.dims))]
    if w.readout_axis is not None:
        offsets[w.readout_axis] = READOUT_LABEL
    return write_array(
        base,
        w.values,
        labels=("t", "t'", *offsets),
        metadata={
            "readout_axis": w.readout_axis,
            "readout_length": w.readout_length,
            "source_dims": list(w.source_dims),
        },
    )


def load_weight(base: Path | str) -> WeightFunction:
    """Load a weighting function written by :func:`save_weight`."""
    array, header = read_array(base)
    if array.dtype.kind != "f":
        raise KddFormatError("Weights must be stored as a real array")
    meta = header.metadata
    return WeightFunction(
        values=array.astype(np.float64),
        readout_axis=meta.get("readout_axis"),
        readout_length=int(meta.get("readout_length", 1)),
        source_dims=tuple(meta.get("source_dims", ())),
    )
