"""Grid, sampling-pattern and differential-distribution models."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, field_validator

from ..exceptions import KddDimensionError, KddValidationError

Index = int | Sequence[int]
Sample = tuple[tuple[int, ...], int]


class GridShape(BaseModel):
    """Periodic Cartesian phase-encode grid with ``frames`` time frames.

    All index arithmetic is modulo each phase dimension.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    phase_dims: tuple[int, ...]
    frames: int = Field(default=1, ge=1)

    @field_validator("phase_dims")
    @classmethod
    def _check_phase_dims(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not 1 <= len(value) <= 2:
            raise ValueError(f"phase_dims must have 1 or 2 entries, got {len(value)}")
        if any(n < 1 for n in value):
            raise ValueError(f"phase_dims must be positive, got {value}")
        return value

    @property
    def size(self) -> int:
        """Number of phase-encode locations N."""
        return int(np.prod(self.phase_dims))

    @property
    def ndim(self) -> int:
        """Number of phase-encode dimensions."""
        return len(self.phase_dims)

    @property
    def count_shape(self) -> tuple[int, ...]:
        """Shape of a dense count array, frames first."""
        return (self.frames, *self.phase_dims)

    @property
    def pair_shape(self) -> tuple[int, ...]:
        """Shape of arrays indexed by (t, t', Δk)."""
        return (self.frames, self.frames, *self.phase_dims)

    def wrap(self, k: Index) -> tuple[int, ...]:
        """Reduce an index modulo the grid, returning a full-length tuple.

        Raises:
            KddDimensionError: If ``k`` has the wrong number of components.
        """
        parts = (k,) if isinstance(k, int | np.integer) else tuple(k)
        if len(parts) != self.ndim:
            raise KddDimensionError(
                f"Index {parts} does not match a {self.ndim}-D grid",
                expected=(self.ndim,),
                actual=(len(parts),),
            )
        return tuple(int(i) % n for i, n in zip(parts, self.phase_dims, strict=True))

    def ravel(self, k: Index) -> int:
        """Row-major flat index of ``k``."""
        return int(np.ravel_multi_index(self.wrap(k), self.phase_dims))

    def unravel(self, index: int) -> tuple[int, ...]:
        """Multi-index of a row-major flat index."""
        return tuple(int(i) for i in np.unravel_index(index, self.phase_dims))


@dataclass(eq=False, slots=True)
class SamplingPattern:
    """Nonnegative integer sample counts s(k, t); repeats carry multiplicity.

    ``counts`` has shape ``(T, *phase_dims)``. The pattern is the only
    mutable model and expects a single writer.
    """

    grid: GridShape
    counts: NDArray[np.int64]

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.shape != self.grid.count_shape:
            raise KddDimensionError(
                f"Counts of shape {counts.shape} do not match grid {self.grid.count_shape}",
                expected=self.grid.count_shape,
                actual=counts.shape,
            )
        if np.any(counts < 0):
            raise KddValidationError("Sample counts must be nonnegative")
        self.counts = counts

    @classmethod
    def empty(cls, grid: GridShape) -> SamplingPattern:
        """Create a pattern without samples."""
        return cls(grid=grid, counts=np.zeros(grid.count_shape, dtype=np.int64))

    @classmethod
    def full(cls, grid: GridShape) -> SamplingPattern:
        """Create a fully sampled pattern (one sample per location and frame)."""
        return cls(grid=grid, counts=np.ones(grid.count_shape, dtype=np.int64))

    @classmethod
    def from_samples(cls, grid: GridShape, samples: Iterable[tuple[Index, int]]) -> SamplingPattern:
        """Create a pattern from ``(k, t)`` pairs; repeated pairs add up."""
        pattern = cls.empty(grid)
        for k, t in samples:
            pattern.add(k, t)
        return pattern

    @property
    def totals(self) -> NDArray[np.int64]:
        """Per-frame sample counts N_t."""
        return self.counts.reshape(self.grid.frames, -1).sum(axis=1)

    @property
    def total(self) -> int:
        """Total number of samples, repeats included."""
        return int(self.counts.sum())

    @property
    def acceleration(self) -> float:
        """Acceleration factor R = N·T / Σ N_t."""
        total = self.total
        if total == 0:
            return float("inf")
        return self.grid.size * self.grid.frames / total

    def _check_frame(self, t: int) -> int:
        if not 0 <= t < self.grid.frames:
            raise KddValidationError(f"Frame {t} outside 0..{self.grid.frames - 1}")
        return int(t)

    def count(self, k: Index, t: int) -> int:
        """Return s(k, t)."""
        return int(self.counts[(self._check_frame(t), *self.grid.wrap(k))])

    def add(self, k: Index, t: int, count: int = 1) -> None:
        """Increment s(k, t) by ``count``."""
        if count < 0:
            raise KddValidationError("Use remove() to take samples away")
        self.counts[(self._check_frame(t), *self.grid.wrap(k))] += count

    def remove(self, k: Index, t: int) -> None:
        """Decrement s(k, t) by one.

        Raises:
            KddValidationError: If (k, t) holds no sample.
        """
        key = (self._check_frame(t), *self.grid.wrap(k))
        if self.counts[key] < 1:
            raise KddValidationError(f"No sample at k={key[1:]}, t={t} to remove")
        self.counts[key] -= 1

    def samples(self) -> list[Sample]:
        """Sample list with multiplicity, sorted lexicographically by (k, t)."""
        result: list[Sample] = []
        order = np.moveaxis(self.counts, 0, -1)
        for index in np.argwhere(order > 0):
            *k, t = (int(i) for i in index)
            result.extend([(tuple(k), t)] * int(order[tuple(index)]))
        return result

    def copy(self) -> SamplingPattern:
        """Return an independent copy."""
        return SamplingPattern(grid=self.grid, counts=self.counts.copy())

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, SamplingPattern):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.counts, other.counts))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, slots=True, eq=False)
class PointSpreadFunction:
    """Inverse DFT of each frame's counts, shape ``(T, *phase_dims)``."""

    grid: GridShape
    values: NDArray[np.complex128]


@dataclass(frozen=True, slots=True, eq=False)
class DifferentialDistribution:
    """Cross-correlation p(Δk, t, t') of the frame patterns.

    ``values`` has shape ``(T, T, *phase_dims)`` and is indexed
    ``[t, t', Δk]``; Δk is reduced modulo the grid.
    """

    grid: GridShape
    values: NDArray[np.int64] | NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.pair_shape:
            raise KddDimensionError(
                f"Differential distribution of shape {self.values.shape} "
                f"does not match grid {self.grid.pair_shape}",
                expected=self.grid.pair_shape,
                actual=self.values.shape,
            )

    def masses(self) -> NDArray[Any]:
        """Σ_Δk p(Δk, t, t') for every frame pair; equals N_t·N_t'."""
        return self.values.reshape(self.grid.frames, self.grid.frames, -1).sum(axis=2)
