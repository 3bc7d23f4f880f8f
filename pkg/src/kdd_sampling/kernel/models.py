"""Reproducing-kernel and power-function models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..exceptions import KddDimensionError
from ..grid import GridShape

_LEAD = 4

KernelRow = tuple[int, int, tuple[int, ...]]


@dataclass(frozen=True, slots=True, eq=False)
class KernelMatrix:
    """Matrix-valued k-space kernel K_{ct,c't'}(k, k').

    K depends on k and k' only through k - k', so only the table
    ``K(Δk)`` of shape ``(T, C, T, C, *dims)`` is stored, indexed
    ``[t, c, t', c', Δk]``. Entries for any set of rows are looked up on
    demand.
    """

    table: NDArray[np.complex128]

    def __post_init__(self) -> None:
        table = np.asarray(self.table, dtype=np.complex128)
        if (
            table.ndim < _LEAD + 1
            or table.shape[0] != table.shape[2]
            or table.shape[1] != table.shape[3]
        ):
            raise KddDimensionError(
                f"Kernel table needs shape (T, C, T, C, *dims), got {table.shape}"
            )
        object.__setattr__(self, "table", table)

    @property
    def frames(self) -> int:
        """Number of frames T."""
        return int(self.table.shape[0])

    @property
    def coils(self) -> int:
        """Number of channels C."""
        return int(self.table.shape[1])

    @property
    def dims(self) -> tuple[int, ...]:
        """Grid the offsets live on."""
        return tuple(int(n) for n in self.table.shape[_LEAD:])

    def entry(self, row: KernelRow, col: KernelRow) -> complex:
        """K between rows given as ``(t, c, k)``."""
        t, c, k = row
        tp, cp, kp = col
        delta = tuple((a - b) % n for a, b, n in zip(k, kp, self.dims, strict=True))
        return complex(self.table[(t, c, tp, cp, *delta)])

    def block(
        self,
        rows: tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.int64]],
        cols: tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.int64]],
    ) -> NDArray[np.complex128]:
        """K between two row sets, each ``(frames, coils, flat k)``.

        Returns:
            Matrix of shape ``(len(rows), len(cols))``.
        """
        t_a, c_a, k_a = rows
        t_b, c_b, k_b = cols
        dims = self.dims
        coords_a = np.stack(np.unravel_index(k_a, dims), axis=-1)
        coords_b = np.stack(np.unravel_index(k_b, dims), axis=-1)
        delta = (coords_a[:, None, :] - coords_b[None, :, :]) % np.asarray(dims)
        offsets = np.ravel_multi_index(tuple(np.moveaxis(delta, -1, 0)), dims)
        flat = self.table.reshape(self.frames, self.coils, self.frames, self.coils, -1)
        return flat[t_a[:, None], c_a[:, None], t_b[None, :], c_b[None, :], offsets]

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """Check K_{ct,c't'}(Δk) = conj(K_{c't',ct}(-Δk))."""
        axes = tuple(range(_LEAD, self.table.ndim))
        negated = np.roll(np.flip(self.table, axis=axes), 1, axis=axes)
        mirrored = np.conj(np.transpose(negated, (2, 3, 0, 1, *axes)))
        scale = max(float(np.max(np.abs(self.table))), 1.0)
        return bool(np.allclose(self.table, mirrored, rtol=0.0, atol=tol * scale))


@dataclass(frozen=True, slots=True, eq=False)
class PowerFunction:
    """Squared power function P² per coil and coil-combined.

    ``per_coil`` has shape ``(T, C, *phase_dims)`` and ``combined``, the sum
    over coils, ``(T, *phase_dims)``. ``condition`` is the condition number
    of the sampled Gram system that produced them.
    """

    grid: GridShape
    per_coil: NDArray[np.float64]
    combined: NDArray[np.float64]
    condition: float

    def clipped(self) -> NDArray[np.float64]:
        """Coil-combined values with the numerical floor below zero removed."""
        return np.maximum(self.combined, 0.0)
