"""Weighting-function models."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from ..const import WEIGHT_SYMMETRY_RTOL
from ..exceptions import KddDimensionError, KddValidationError
from ..grid import GridShape

_PAIR_LEAD = 2

Stencil = tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.float64]]


def negate_offsets(values: NDArray[np.float64], lead: int = _PAIR_LEAD) -> NDArray[np.float64]:
    """Return ``a`` with a[..., Δk] replaced by a[..., -Δk] (modulo the grid)."""
    axes = tuple(range(lead, values.ndim))
    return np.roll(np.flip(values, axis=axes), 1, axis=axes)


def symmetrize(values: NDArray[np.float64]) -> NDArray[np.float64]:
    """Average with the mirrored pairs so w(Δk, t, t') = w(-Δk, t', t) holds bitwise."""
    mirrored = np.swapaxes(negate_offsets(values), 0, 1)
    return 0.5 * (values + mirrored)


@dataclass(frozen=True, slots=True, eq=False)
class WeightFunction:
    """Real nonnegative weighting function w(Δk, t, t').

    ``values`` has shape ``(T, T, *dims)`` indexed ``[t, t', Δk]``. When
    ``readout_axis`` is set the last dimensions still include the readout
    and :func:`~kdd_sampling.weighting.collapse_readout` must be applied
    before design. ``readout_length`` records how many fully sampled
    readout positions were summed into the values; spectral moments are
    scaled by it.
    """

    values: NDArray[np.float64]
    readout_axis: int | None = None
    readout_length: int = 1
    source_dims: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim < _PAIR_LEAD + 1 or values.shape[0] != values.shape[1]:
            raise KddDimensionError(f"Weights need shape (T, T, *dims), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise KddValidationError("Weights must be finite")
        if np.any(values < 0):
            raise KddValidationError("Weights must be nonnegative")
        if self.readout_length < 1:
            raise KddValidationError("Readout length must be positive")
        mirrored = np.swapaxes(negate_offsets(values), 0, 1)
        if np.abs(values - mirrored).max() > WEIGHT_SYMMETRY_RTOL * values.max():
            raise KddValidationError("Weights violate w(Δk, t, t') = w(-Δk, t', t)")
        object.__setattr__(self, "values", values)
        if not self.source_dims:
            object.__setattr__(self, "source_dims", tuple(values.shape[_PAIR_LEAD:]))

    @property
    def frames(self) -> int:
        """Number of frames T."""
        return int(self.values.shape[0])

    @property
    def dims(self) -> tuple[int, ...]:
        """Offset grid of the stored values."""
        return tuple(int(n) for n in self.values.shape[_PAIR_LEAD:])

    @property
    def grid(self) -> GridShape:
        """Phase-encode grid the weights act on.

        Raises:
            KddValidationError: If a readout dimension has not been collapsed.
        """
        if self.readout_axis is not None:
            raise KddValidationError("Collapse the readout dimension before using the weights")
        return GridShape(phase_dims=self.dims, frames=self.frames)

    @property
    def effective(self) -> NDArray[np.float64]:
        """Values scaled by the collapsed readout length, as used by the designers."""
        if self.readout_length == 1:
            return self.values
        return self.values * float(self.readout_length)


@dataclass(frozen=True, eq=False)
class SparseWeight:
    """Thresholded surrogate ŵ: retained entries of a weighting function.

    Each entry ``i`` is ``values[i]`` at offset ``offsets[i]`` for the frame
    pair ``(frames_t[i], frames_tp[i])``.
    """

    grid: GridShape
    offsets: NDArray[np.int64]
    frames_t: NDArray[np.int64]
    frames_tp: NDArray[np.int64]
    values: NDArray[np.float64]
    readout_length: int = 1
    _stencils: dict[int, Stencil] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        count = len(self.values)
        if self.offsets.shape != (count, self.grid.ndim):
            raise KddDimensionError(
                "Sparse offsets do not match the grid",
                expected=(count, self.grid.ndim),
                actual=self.offsets.shape,
            )
        if len(self.frames_t) != count or len(self.frames_tp) != count:
            raise KddDimensionError("Sparse frame indices do not match the value count")
        if np.any(self.values < 0):
            raise KddValidationError("Sparse weights must be nonnegative")

    @property
    def support_size(self) -> int:
        """Number of retained entries, supp(ŵ)."""
        return len(self.values)

    @cached_property
    def effective(self) -> NDArray[np.float64]:
        """Retained values scaled by the collapsed readout length."""
        if self.readout_length == 1:
            return self.values
        return self.values * float(self.readout_length)

    def to_dense(self) -> WeightFunction:
        """Expand into a dense weighting function (zeros off the support)."""
        dense = np.zeros(self.grid.pair_shape)
        dense[(self.frames_t, self.frames_tp, *self.offsets.T)] = self.values
        return WeightFunction(values=symmetrize(dense), readout_length=self.readout_length)

    def stencil(self, frame: int) -> Stencil:
        """Update stencil for inserting a sample in ``frame``.

        Merges the two one-sided sums of the ΔJ update: the entries
        ŵ(Δk, t, frame) act on k = k' + Δk, and the entries ŵ(Δk, frame, t)
        act on k = k' - Δk. Both contributions to the same target are summed
        before they are applied.

        Returns:
            ``(target_frames, offsets, increments)`` with unique targets.
        """
        cached = self._stencils.get(frame)
        if cached is not None:
            return cached

        dims = np.asarray(self.grid.phase_dims)
        scratch = np.zeros(self.grid.count_shape)
        first = self.frames_tp == frame
        scratch[(self.frames_t[first], *self.offsets[first].T)] = self.effective[first]
        second = self.frames_t == frame
        mirrored = (-self.offsets[second]) % dims
        np.add.at(scratch, (self.frames_tp[second], *mirrored.T), self.effective[second])

        index = np.nonzero(scratch)
        stencil = (
            index[0].astype(np.int64),
            np.stack(index[1:], axis=1).astype(np.int64),
            scratch[index],
        )
        self._stencils[frame] = stencil
        return stencil
