"""Reconstruction data, image and g-factor models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field

from ..exceptions import KddDimensionError, KddValidationError
from ..grid import SamplingPattern


@dataclass(frozen=True, slots=True, eq=False)
class KSpaceData:
    """Sampled k-space rows y.

    Rows are ordered by frame, then coil, then sampled location on the full
    spatial grid (row-major, readout included), with repeated samples
    appearing once per repeat.
    """

    pattern: SamplingPattern
    coils: int
    readout_length: int
    values: NDArray[np.complex128]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        expected = self.pattern.total * self.readout_length * self.coils
        if values.shape != (expected,):
            raise KddDimensionError(
                f"Expected {expected} k-space rows, got shape {values.shape}",
                expected=(expected,),
                actual=values.shape,
            )
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        """Number of rows Σ counts·readout·C."""
        return int(self.values.shape[0])


@dataclass(frozen=True, slots=True, eq=False)
class Image:
    """Coefficient images m_l(r), shape ``(L, *spatial_dims)``."""

    values: NDArray[np.complex128]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim < 2:
            raise KddDimensionError(f"Images need shape (L, *spatial), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise KddValidationError("Image values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, basis_size: int, spatial_dims: tuple[int, ...]) -> Image:
        """All-zero image."""
        return cls(values=np.zeros((basis_size, *spatial_dims), dtype=np.complex128))

    def norm(self) -> float:
        """Euclidean norm over all coefficients and voxels."""
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True, slots=True, eq=False)
class GFactorMap:
    """Noise amplification g per coefficient image, shape ``(L, *spatial_dims)``.

    Zero where the fully sampled reconstruction has no noise (outside the
    support).
    """

    values: NDArray[np.float64]
    acceleration: float
    replicas: int = 0

    def combined(self) -> NDArray[np.float64]:
        """Mean over the L coefficient maps."""
        return np.asarray(self.values.mean(axis=0), dtype=np.float64)


class GFactorStats(BaseModel):
    """Summary of a g-factor map over its nonzero region."""

    model_config = {"frozen": True}

    max: float
    median: float
    mean: float
    rms: float
    p95: float = Field(description="95th percentile")


class ReconMetrics(BaseModel):
    """Image error and, when a map is given, g-factor statistics."""

    model_config = {"frozen": True}

    rmse: float
    max_g: float | None = None
    median_g: float | None = None
    mean_g: float | None = None
    rms_g: float | None = None
    p95_g: float | None = None
