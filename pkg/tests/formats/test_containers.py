"""Tests for the array container format."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from kdd_sampling import KddFormatError, KddValidationError
from kdd_sampling.formats import (
    container_paths,
    load_sensitivity,
    load_weight,
    read_array,
    save_sensitivity,
    save_weight,
    write_array,
)
from kdd_sampling.sensitivity import SensitivitySet, from_coils, synthetic_coils
from kdd_sampling.weighting import WeightFunction, compute_w


class TestContainerPaths:
    """Tests for container_paths."""

    @pytest.mark.parametrize("name", ["sens", "sens.json", "sens.raw"])
    def test_suffixes(self, tmp_path: Path, name: str) -> None:
        """Test that either file of a container names the pair."""
        header, payload = container_paths(tmp_path / name)
        assert header == tmp_path / "sens.json"
        assert payload == tmp_path / "sens.raw"


class TestArrays:
    """Tests for write_array and read_array."""

    @pytest.mark.parametrize("dtype", ["complex64", "complex128", "float32", "float64", "int64"])
    def test_dtypes(self, tmp_path: Path, dtype: str) -> None:
        """Test that every supported dtype is preserved."""
        array = (np.arange(12).reshape(3, 4) + 1).astype(dtype)
        write_array(tmp_path / "a", array, labels=("y", "x"), metadata={"note": "x"})
        loaded, header = read_array(tmp_path / "a")
        assert loaded.dtype == np.dtype(dtype)
        np.testing.assert_array_equal(loaded, array)
        assert header.labels == ("y", "x")
        assert header.metadata == {"note": "x"}

    def test_little_endian_payload(self, tmp_path: Path) -> None:
        """Test the byte order of the payload."""
        _, payload = write_array(tmp_path / "a", np.array([1], dtype=np.int64))
        assert payload.read_bytes() == b"\x01" + b"\x00" * 7

    def test_unsupported_dtype(self, tmp_path: Path) -> None:
        """Test that unsupported dtypes are refused."""
        with pytest.raises(KddFormatError):
            write_array(tmp_path / "a", np.zeros(3, dtype=bool))

    def test_truncated_payload(self, tmp_path: Path) -> None:
        """Test the payload size check."""
        _, payload = write_array(tmp_path / "a", np.zeros(4))
        payload.write_bytes(payload.read_bytes()[:-8])
        with pytest.raises(KddFormatError) as info:
            read_array(tmp_path / "a")
        assert info.value.path == payload

    @pytest.mark.parametrize(
        "header",
        [
            "not json",
            '{"format": "other", "dims": [1], "dtype": "float64"}',
            '{"dims": [1], "dtype": "float64", "order": "column-major"}',
            '{"dims": [1], "dtype": "float64", "extra": 1}',
        ],
    )
    def test_invalid_header(self, tmp_path: Path, header: str) -> None:
        """Test rejected headers."""
        header_path, _ = write_array(tmp_path / "a", np.zeros(1))
        header_path.write_text(header, encoding="utf-8")
        with pytest.raises(KddFormatError):
            read_array(tmp_path / "a")

    def test_missing(self, tmp_path: Path) -> None:
        """Test that a missing container raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_array(tmp_path / "absent")


class TestModels:
    """Tests for the sensitivity and weight containers."""

    def test_sensitivity(self, tmp_path: Path, coil_sens: SensitivitySet) -> None:
        """Test storing and loading a coil model."""
        save_sensitivity(tmp_path / "sens", coil_sens)
        loaded = load_sensitivity(tmp_path / "sens")
        np.testing.assert_array_equal(loaded.values, coil_sens.values)
        assert loaded.readout_axis is None

    def test_sensitivity_readout_from_labels(self, tmp_path: Path) -> None:
        """Test that the readout axis is recovered from the labels alone."""
        sens = from_coils(synthetic_coils((3, 4), 2, readout_axis=1))
        write_array(tmp_path / "sens", sens.values, labels=("t", "l", "c", "r0", "readout"))
        assert load_sensitivity(tmp_path / "sens").readout_axis == 1

    def test_weights(self, tmp_path: Path, coil_weights: WeightFunction) -> None:
        """Test storing and loading weights with their metadata."""
        header, _ = save_weight(tmp_path / "w", coil_weights)
        loaded = load_weight(tmp_path / "w")
        np.testing.assert_array_equal(loaded.values, coil_weights.values)
        assert loaded.readout_length == coil_weights.readout_length
        assert json.loads(header.read_text())["labels"] == ["t", "t'", "dk0", "dk1"]

    def test_weights_with_readout(self, tmp_path: Path) -> None:
        """Test that the readout metadata survives."""
        w = compute_w(from_coils(synthetic_coils((3, 4), 2, readout_axis=0)))
        save_weight(tmp_path / "w", w)
        loaded = load_weight(tmp_path / "w")
        assert loaded.readout_axis == 0
        assert loaded.source_dims == (3, 4)

    def test_weights_must_be_real(self, tmp_path: Path) -> None:
        """Test that complex arrays are not weights."""
        write_array(tmp_path / "w", np.zeros((1, 1, 4), dtype=np.complex128))
        with pytest.raises(KddFormatError):
            load_weight(tmp_path / "w")

    def test_asymmetric_weights_are_rejected(self, tmp_path: Path) -> None:
        """Test that a stored array off the pair symmetry does not load."""
        values = np.zeros((1, 1, 4))
        values[0, 0, 1] = 1.0
        write_array(tmp_path / "w", values)
        with pytest.raises(KddValidationError):
            load_weight(tmp_path / "w")
