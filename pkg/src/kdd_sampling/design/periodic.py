"""Periodic patterns: lattice-tiled differential distributions and CAIPIRINHA cells."""

from __future__ import annotations

import logging
from collections.abc import Iterable

import numpy as np

from ..exceptions import KddValidationError
from ..grid import DifferentialDistribution, GridShape, SamplingPattern, dd_fft
from ..spectral import trace_moment2
from ..weighting import WeightFunction
from .baselines import uniform_pattern
from .models import PeriodicCell, PeriodicScore

_LOGGER = logging.getLogger(__name__)


def periodic_dd(cell: PeriodicCell) -> DifferentialDistribution:
    """Differential distribution of a tiled cell without tiling it.

    Only the period p₀ of the cell's own distribution is computed; on the
    full grid p is p₀ repeated and scaled by the number of cells.

    Args:
        cell: The periodic cell.

    Returns:
        Integer distribution equal to ``dd_direct(cell.tile())``.
    """
    local = SamplingPattern(grid=cell.cell_grid, counts=cell.counts)
    p0 = dd_fft(local).values
    copies = int(np.prod(cell.repeats))
    values = np.tile(p0, (1, 1, *cell.repeats)) * copies
    return DifferentialDistribution(grid=cell.grid, values=values)


def caipi_enumerate(
    r: int,
    grid: GridShape | None = None,
    frames: int = 1,
) -> list[PeriodicCell]:
    """All distinct 2D-CAIPIRINHA cells with acceleration ``r``.

    Every factorization ``r = R_y·R_z`` is combined with every shift
    ``0 <= Δ < R_y`` applied to successive sampled k_z rows. Cells have
    period ``r × r`` and are deduplicated by their differential
    distribution, keeping the first occurrence in (R_y, Δ) order.

    Args:
        r: Acceleration factor.
        grid: Grid to tile the cells over; the ``r × r`` cell grid when omitted.
        frames: Frame count used when ``grid`` is omitted.

    Returns:
        The distinct cells.

    Raises:
        KddValidationError: If ``r`` is not positive or the grid is not a
            2-D grid divisible by ``r``.
    """
    if r < 1:
        raise KddValidationError(f"Acceleration must be positive, got {r}")
    target = grid or GridShape(phase_dims=(r, r), frames=frames)
    if target.ndim != 2:
        raise KddValidationError("CAIPIRINHA cells need a 2-D phase-encode grid")
    cell_grid = GridShape(phase_dims=(r, r), frames=target.frames)

    cells: list[PeriodicCell] = []
    seen: set[bytes] = set()
    for r_y in range(1, r + 1):
        if r % r_y:
            continue
        r_z = r // r_y
        for shift in range(r_y):
            local = uniform_pattern(cell_grid, r_y, r_z, shift)
            key = dd_fft(local).values.tobytes()
            if key in seen:
                continue
            seen.add(key)
            cells.append(
                PeriodicCell(
                    counts=local.counts,
                    grid=target,
                    label=f"Ry={r_y} Rz={r_z} shift={shift}",
                )
            )
    _LOGGER.debug("Enumerated %d CAIPIRINHA cells for R=%d", len(cells), r)
    return cells


def evaluate_periodic(w: WeightFunction, cells: Iterable[PeriodicCell]) -> list[PeriodicScore]:
    """Rank periodic cells by their objective J = ⟨w, p⟩.

    Cells defined on another grid are retargeted to the grid of ``w``.

    Args:
        w: Weights on the phase-encode grid.
        cells: Candidate cells.

    Returns:
        ``(cell, J)`` pairs in ascending J; equal values keep input order.
    """
    grid = w.grid
    scores = []
    for cell in cells:
        placed = cell if cell.grid == grid else cell.retarget(grid)
        scores.append(PeriodicScore(cell=placed, objective=trace_moment2(w, periodic_dd(placed))))
    return sorted(scores, key=lambda score: score.objective)
