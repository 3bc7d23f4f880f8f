"""Design state, configuration and periodic-cell models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, model_validator

from ..const import TieBreak
from ..exceptions import KddDimensionError, KddValidationError
from ..grid import GridShape, SamplingPattern


@dataclass(eq=False, slots=True)
class DeltaJMap:
    """Insertion cost ΔJ(k, t), shape ``(T, *phase_dims)``, and the running J."""

    grid: GridShape
    values: NDArray[np.float64]
    objective: float = 0.0

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.count_shape:
            raise KddDimensionError(
                "ΔJ map does not match its grid",
                expected=self.grid.count_shape,
                actual=self.values.shape,
            )

    @property
    def flat(self) -> NDArray[np.float64]:
        """View of the values with shape ``(T, N)``."""
        return self.values.reshape(self.grid.frames, self.grid.size)

    def copy(self) -> DeltaJMap:
        """Return an independent copy."""
        return DeltaJMap(grid=self.grid, values=self.values.copy(), objective=self.objective)


class DesignConfig(BaseModel):
    """Settings for the greedy pattern designers."""

    model_config = {"frozen": True, "extra": "forbid"}

    total: int = Field(ge=0)
    quotas: tuple[int, ...] | None = None
    tie_break: TieBreak = TieBreak.LEXICOGRAPHIC
    allow_repeats: bool = True
    seed: int = 0

    @model_validator(mode="after")
    def _check_quotas(self) -> Self:
        if self.quotas is not None:
            if any(q < 0 for q in self.quotas):
                raise ValueError("Per-frame quotas must be nonnegative")
            if sum(self.quotas) != self.total:
                raise ValueError(
                    f"Per-frame quotas sum to {sum(self.quotas)}, expected total {self.total}"
                )
        return self

    @classmethod
    def even_quotas(cls, total: int, frames: int, **kwargs: object) -> DesignConfig:
        """Config whose quotas spread ``total`` as evenly as possible over frames."""
        base, extra = divmod(total, frames)
        quotas = tuple(base + (t < extra) for t in range(frames))
        return cls.model_validate({"total": total, "quotas": quotas, **kwargs})


@dataclass(frozen=True, slots=True, eq=False)
class PeriodicCell:
    """Sampling cell s₀ of period n₀ tiled over ``grid``.

    ``counts`` has shape ``(T, *n₀)``; every n₀ entry divides the matching
    grid dimension.
    """

    counts: NDArray[np.int64]
    grid: GridShape
    label: str = ""

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != self.grid.ndim + 1 or counts.shape[0] != self.grid.frames:
            raise KddDimensionError(
                f"Cell of shape {counts.shape} does not fit grid {self.grid.count_shape}",
                actual=counts.shape,
            )
        if np.any(counts < 0):
            raise KddValidationError("Cell counts must be nonnegative")
        period = counts.shape[1:]
        if any(n % p for n, p in zip(self.grid.phase_dims, period, strict=True)):
            raise KddValidationError(
                f"Cell period {period} does not divide the grid {self.grid.phase_dims}"
            )
        object.__setattr__(self, "counts", counts)

    @property
    def period(self) -> tuple[int, ...]:
        """Cell period n₀ per dimension."""
        return tuple(int(n) for n in self.counts.shape[1:])

    @property
    def cell_grid(self) -> GridShape:
        """Grid of a single cell."""
        return GridShape(phase_dims=self.period, frames=self.grid.frames)

    @property
    def repeats(self) -> tuple[int, ...]:
        """Number of cells along each dimension."""
        return tuple(n // p for n, p in zip(self.grid.phase_dims, self.period, strict=True))

    def tile(self) -> SamplingPattern:
        """Expand the cell into a pattern on the full grid."""
        return SamplingPattern(grid=self.grid, counts=np.tile(self.counts, (1, *self.repeats)))

    def retarget(self, grid: GridShape) -> PeriodicCell:
        """The same cell tiled over another grid."""
        return PeriodicCell(counts=self.counts, grid=grid, label=self.label)


class PeriodicScore(NamedTuple):
    """A periodic cell with its objective J."""

    cell: PeriodicCell
    objective: float
