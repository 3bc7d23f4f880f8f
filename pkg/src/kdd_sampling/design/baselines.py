"""Baseline pattern generators: uniform lattices, uniform random and Poisson-disc."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from ..const import POISSON_MAX_ATTEMPTS, POISSON_SHRINK
from ..exceptions import KddValidationError
from ..grid import GridShape, SamplingPattern

_LOGGER = logging.getLogger(__name__)


def _split(total: int, frames: int) -> list[int]:
    base, extra = divmod(total, frames)
    return [base + (t < extra) for t in range(frames)]


def uniform_pattern(
    grid: GridShape,
    r_y: int,
    r_z: int = 1,
    shift: int = 0,
) -> SamplingPattern:
    """Regular lattice, identical in every frame.

    In 2-D, k is sampled when ``k_z % r_z == 0`` and
    ``k_y % r_y == (shift * (k_z // r_z)) % r_y``, so every sampled k_z row
    is shifted by ``shift`` relative to the previous one (2D-CAIPIRINHA).
    In 1-D, ``k % r_y == shift % r_y``.

    Args:
        grid: Target grid.
        r_y: Acceleration along the first phase dimension.
        r_z: Acceleration along the second phase dimension (1 in 1-D).
        shift: Row shift.

    Returns:
        The lattice pattern.

    Raises:
        KddValidationError: If a factor is not positive or does not divide
            its grid dimension.
    """
    if r_y < 1 or r_z < 1:
        raise KddValidationError(f"Acceleration factors must be positive, got {r_y}x{r_z}")
    if grid.phase_dims[0] % r_y:
        raise KddValidationError(f"R_y={r_y} does not divide {grid.phase_dims[0]}")

    if grid.ndim == 1:
        if r_z != 1:
            raise KddValidationError("R_z applies to 2-D grids only")
        mask = np.arange(grid.phase_dims[0]) % r_y == shift % r_y
    else:
        ny, nz = grid.phase_dims
        if nz % r_z:
            raise KddValidationError(f"R_z={r_z} does not divide {nz}")
        if (shift * (nz // r_z)) % r_y:
            raise KddValidationError(
                f"Shift {shift} does not wrap consistently over {nz // r_z} rows"
            )
        ky, kz = np.meshgrid(np.arange(ny), np.arange(nz), indexing="ij")
        mask = (kz % r_z == 0) & (ky % r_y == (shift * (kz // r_z)) % r_y)

    counts = np.broadcast_to(mask.astype(np.int64), grid.count_shape)
    return SamplingPattern(grid=grid, counts=counts)


def uniform_random(
    grid: GridShape,
    n: int,
    seed: int = 0,
    *,
    replace: bool = False,
) -> SamplingPattern:
    """White-noise pattern with ``n`` samples spread evenly over the frames.

    Args:
        grid: Target grid.
        n: Total sample count.
        seed: Random seed.
        replace: Draw i.i.d. locations (repeats possible) instead of distinct ones.

    Returns:
        The random pattern.

    Raises:
        KddValidationError: If ``n`` is negative, or exceeds the grid size per
            frame without replacement.
    """
    if n < 0:
        raise KddValidationError(f"Sample count must be nonnegative, got {n}")
    quotas = _split(n, grid.frames)
    if not replace and max(quotas) > grid.size:
        raise KddValidationError(
            f"Cannot draw {max(quotas)} distinct locations from {grid.size} per frame"
        )

    rng = np.random.default_rng(seed)
    pattern = SamplingPattern.empty(grid)
    for t, quota in enumerate(quotas):
        picks = rng.choice(grid.size, size=quota, replace=replace)
        np.add.at(pattern.counts[t].reshape(-1), picks, 1)
    return pattern


def _distances(
    grid: GridShape,
    coords: NDArray[np.int64],
    point: NDArray[np.int64],
    scale: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Anisotropic periodic distance from ``point`` to every grid location."""
    dims = np.asarray(grid.phase_dims)
    delta = np.abs(coords - point) % dims
    delta = np.minimum(delta, dims - delta)
    return np.sqrt(np.sum((delta * scale) ** 2, axis=1))


def _dart_radius(
    grid: GridShape,
    rng: np.random.Generator,
    r_min: float,
    scale: NDArray[np.float64],
) -> tuple[NDArray[np.int64], float]:
    """One pass over a random permutation of the grid."""
    coords = np.indices(grid.phase_dims).reshape(grid.ndim, -1).T
    nearest = np.full(grid.size, np.inf)
    chosen: list[int] = []
    for index in rng.permutation(grid.size):
        if nearest[index] >= r_min:
            chosen.append(int(index))
            nearest = np.minimum(nearest, _distances(grid, coords, coords[index], scale))
    return np.asarray(chosen, dtype=np.int64), r_min


def _dart_count(
    grid: GridShape,
    rng: np.random.Generator,
    r_min: float | None,
    target: int,
    scale: NDArray[np.float64],
) -> tuple[NDArray[np.int64], float]:
    """Dart throwing with radius back-off until ``target`` samples are placed."""
    coords = np.indices(grid.phase_dims).reshape(grid.ndim, -1).T
    nearest = np.full(grid.size, np.inf)
    chosen: list[int] = []
    if r_min is None:
        volume = grid.size * float(np.prod(scale))
        radius = (volume / max(target, 1)) ** (1.0 / grid.ndim)
    else:
        radius = r_min
    free = list(range(grid.size))
    failures = 0
    while len(chosen) < target:
        slot = int(rng.integers(len(free)))
        index = free[slot]
        if nearest[index] >= radius:
            chosen.append(index)
            free[slot] = free[-1]
            free.pop()
            nearest = np.minimum(nearest, _distances(grid, coords, coords[index], scale))
            failures = 0
            continue
        failures += 1
        if failures >= POISSON_MAX_ATTEMPTS:
            radius *= POISSON_SHRINK
            failures = 0
    return np.asarray(chosen, dtype=np.int64), radius


def poisson_disc(
    grid: GridShape,
    *,
    r_min: float | None = None,
    target: int | None = None,
    anisotropy: Sequence[float] | None = None,
    seed: int = 0,
) -> SamplingPattern:
    """Poisson-disc pattern by dart throwing on the periodic grid.

    With only ``r_min`` every location is visited once in random order and
    kept when no earlier sample lies closer than ``r_min``. With ``target``
    random free locations are drawn until the count is met; after
    ``POISSON_MAX_ATTEMPTS`` consecutive rejections the radius shrinks by
    ``POISSON_SHRINK``. The target is spread evenly over the frames and each
    frame is drawn independently.

    Args:
        grid: Target grid.
        r_min: Minimum distance (starting radius in target mode).
        target: Total sample count.
        anisotropy: Per-dimension distance scale; distances are
            ``sqrt(Σ (a_d·Δ_d)²)`` with wrap-around.
        seed: Random seed.

    Returns:
        The Poisson-disc pattern.

    Raises:
        KddValidationError: If neither ``r_min`` nor ``target`` is given, the
            radius is not positive, or the target exceeds the grid.
    """
    if r_min is None and target is None:
        raise KddValidationError("Poisson-disc sampling needs r_min or a target count")
    if r_min is not None and not r_min > 0:
        raise KddValidationError(f"r_min must be positive, got {r_min}")
    if target is not None and not 0 <= target <= grid.size * grid.frames:
        raise KddValidationError(
            f"Target of {target} samples is infeasible on {grid.size * grid.frames} candidates"
        )
    scale = np.ones(grid.ndim) if anisotropy is None else np.asarray(anisotropy, dtype=float)
    if scale.shape != (grid.ndim,) or np.any(scale <= 0):
        raise KddValidationError(f"Anisotropy must hold {grid.ndim} positive factor(s)")

    quotas: list[int | None] = (
        [None] * grid.frames if target is None else list(_split(target, grid.frames))
    )
    rng = np.random.default_rng(seed)
    pattern = SamplingPattern.empty(grid)
    for t, quota in enumerate(quotas):
        if quota is None:
            chosen, radius = _dart_radius(grid, rng, float(r_min or 0.0), scale)
        else:
            chosen, radius = _dart_count(grid, rng, r_min, quota, scale)
        pattern.counts[t].reshape(-1)[chosen] = 1
        _LOGGER.debug(
            "Poisson-disc frame %d: %d samples, final radius %.4g",
            t,
            len(chosen),
            radius,
        )
    return pattern
