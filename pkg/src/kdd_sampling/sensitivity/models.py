"""Sensitivity functions S_{t,l,c}(r) and the inputs they are built from."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..const import BASIS_RANK_TOL
from ..exceptions import KddDimensionError, KddValidationError
from ..grid import GridShape, SamplingPattern

_LOGGER = logging.getLogger(__name__)

_LEAD = 3


def _check_readout(readout_axis: int | None, spatial_ndim: int) -> None:
    if not 1 <= spatial_ndim <= 3:
        raise KddDimensionError(f"Expected 1 to 3 spatial dimensions, got {spatial_ndim}")
    phase_ndim = spatial_ndim - (readout_axis is not None)
    if readout_axis is not None and not 0 <= readout_axis < spatial_ndim:
        raise KddValidationError(
            f"Readout axis {readout_axis} outside 0..{spatial_ndim - 1}"
        )
    if not 1 <= phase_ndim <= 2:
        raise KddDimensionError(f"Expected 1 or 2 phase-encode dimensions, got {phase_ndim}")


@dataclass(frozen=True, slots=True, eq=False)
class SensitivitySet:
    """Complex sensitivity functions, shape ``(T, L, C, *spatial_dims)``.

    ``readout_axis`` indexes ``spatial_dims`` and marks a fully sampled
    readout dimension; the remaining spatial dimensions are the
    phase-encode grid.
    """

    values: NDArray[np.complex128]
    readout_axis: int | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim < _LEAD + 1:
            raise KddDimensionError(
                f"Sensitivities need shape (T, L, C, *spatial), got {values.shape}"
            )
        _check_readout(self.readout_axis, values.ndim - _LEAD)
        if not np.all(np.isfinite(values)):
            raise KddValidationError("Sensitivities must be finite")
        frames, basis, coils = values.shape[:_LEAD]
        if basis > frames * coils:
            _LOGGER.warning(
                "L=%d exceeds T*C=%d; the per-voxel subspace is degenerate",
                basis,
                frames * coils,
            )
        object.__setattr__(self, "values", values)

    @property
    def frames(self) -> int:
        """Number of frames T."""
        return int(self.values.shape[0])

    @property
    def basis_size(self) -> int:
        """Number of coefficient images L."""
        return int(self.values.shape[1])

    @property
    def coils(self) -> int:
        """Number of channels C."""
        return int(self.values.shape[2])

    @property
    def spatial_dims(self) -> tuple[int, ...]:
        """Image grid over r, readout included."""
        return tuple(int(n) for n in self.values.shape[_LEAD:])

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        """Axes of ``values`` that index r."""
        return tuple(range(_LEAD, self.values.ndim))

    @property
    def phase_dims(self) -> tuple[int, ...]:
        """Spatial dimensions that are phase encoded."""
        return tuple(n for i, n in enumerate(self.spatial_dims) if i != self.readout_axis)

    @property
    def readout_length(self) -> int:
        """Length of the readout dimension (1 without one)."""
        return 1 if self.readout_axis is None else self.spatial_dims[self.readout_axis]

    @property
    def voxels(self) -> int:
        """Number of image voxels N (readout included)."""
        return int(np.prod(self.spatial_dims))

    @property
    def grid(self) -> GridShape:
        """Phase-encode grid on which patterns for this model live."""
        return GridShape(phase_dims=self.phase_dims, frames=self.frames)

    def expand_counts(self, pattern: SamplingPattern) -> NDArray[np.int64]:
        """Pattern counts on the full spatial grid, shape ``(T, *spatial_dims)``.

        The readout dimension, when present, is fully sampled.

        Raises:
            KddDimensionError: If the pattern grid does not match the model.
        """
        if pattern.grid != self.grid:
            raise KddDimensionError(
                f"Pattern grid {pattern.grid.count_shape} does not match "
                f"the model grid {self.grid.count_shape}",
                expected=self.grid.count_shape,
                actual=pattern.grid.count_shape,
            )
        if self.readout_axis is None:
            return pattern.counts
        counts = np.expand_dims(pattern.counts, axis=1 + self.readout_axis)
        return np.broadcast_to(counts, (self.frames, *self.spatial_dims))

    def active_columns(self) -> int:
        """Number of (r, l) columns of E that are not identically zero."""
        energy = np.sum(np.abs(self.values) ** 2, axis=(0, 2))
        return int(np.count_nonzero(energy))


@dataclass(frozen=True, slots=True, eq=False)
class SupportMask:
    """Boolean object support over r."""

    values: NDArray[np.bool_]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=bool)
        if values.ndim == 0:
            raise KddDimensionError("Support mask must have at least one dimension")
        if not values.any():
            raise KddValidationError("Support mask is empty")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, slots=True, eq=False)
class TemporalBasis:
    """Temporal basis β_l(t), shape ``(T, L)`` with linearly independent columns."""

    values: NDArray[np.complex128] | NDArray[np.float64]

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise KddDimensionError(f"Temporal basis must be 2-D (T, L), got {values.shape}")
        frames, size = values.shape
        if size > frames:
            raise KddValidationError(f"Basis size L={size} exceeds frame count T={frames}")
        if np.linalg.matrix_rank(values, tol=BASIS_RANK_TOL) < size:
            raise KddValidationError("Temporal basis columns are linearly dependent")
        object.__setattr__(self, "values", values)

    @property
    def frames(self) -> int:
        """Number of frames T."""
        return int(self.values.shape[0])

    @property
    def size(self) -> int:
        """Number of basis functions L."""
        return int(self.values.shape[1])


@dataclass(frozen=True, slots=True, eq=False)
class CoilMaps:
    """Coil sensitivity maps, shape ``(C, *spatial_dims)``."""

    values: NDArray[np.complex128]
    readout_axis: int | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim < 2:
            raise KddDimensionError(f"Coil maps need shape (C, *spatial), got {values.shape}")
        _check_readout(self.readout_axis, values.ndim - 1)
        if not np.all(np.isfinite(values)):
            raise KddValidationError("Coil maps must be finite")
        object.__setattr__(self, "values", values)

    @property
    def coils(self) -> int:
        """Number of channels C."""
        return int(self.values.shape[0])

    @property
    def spatial_dims(self) -> tuple[int, ...]:
        """Image grid over r."""
        return tuple(int(n) for n in self.values.shape[1:])

    def sum_of_squares(self) -> NDArray[np.float64]:
        """Σ_c |C(r, c)|²."""
        return np.sum(np.abs(self.values) ** 2, axis=0)

    def normalized(self, support: SupportMask | None = None) -> CoilMaps:
        """Scale the maps so the sum of squares is 1 on ``support``.

        Voxels outside the support, or where every coil vanishes, are set
        to zero.

        Args:
            support: Region to normalize over; everywhere when None.

        Returns:
            The normalized maps.
        """
        sos = self.sum_of_squares()
        region = sos > 0
        if support is not None:
            if support.values.shape != self.spatial_dims:
                raise KddDimensionError(
                    "Support does not match the coil grid",
                    expected=self.spatial_dims,
                    actual=support.values.shape,
                )
            region &= support.values
        scale = np.zeros_like(sos)
        scale[region] = 1.0 / np.sqrt(sos[region])
        return CoilMaps(values=self.values * scale, readout_axis=self.readout_axis)
