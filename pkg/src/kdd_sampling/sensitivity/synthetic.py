"""Deterministic synthetic fixtures: coils, temporal bases, supports and phantoms."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import BSpline

from ..const import CoilProfile
from ..exceptions import KddValidationError
from .models import CoilMaps, SupportMask, TemporalBasis


def _coordinates(dims: Sequence[int]) -> list[NDArray[np.float64]]:
    return [grid.astype(np.float64) for grid in np.meshgrid(*map(np.arange, dims), indexing="ij")]


def _border_centers(dims: Sequence[int], coils: int) -> NDArray[np.float64]:
    """Coil centres equally spaced on the border of the image."""
    if len(dims) == 1:
        return np.linspace(0.0, dims[0] - 1.0, coils)[:, None]

    mid = np.array([(n - 1) / 2 for n in dims])
    half = np.array([(n - 1) / 2 for n in dims[:2]])
    centers = np.tile(mid, (coils, 1))
    for c in range(coils):
        angle = 2 * math.pi * c / coils
        direction = np.array([math.cos(angle), math.sin(angle)])
        # stretch the unit direction until it meets the bounding rectangle
        reach = np.min(np.where(np.abs(direction) > 1e-12, half / np.abs(direction), np.inf))
        centers[c, :2] = mid[:2] + reach * direction
    return centers


def _gaussian_maps(dims: Sequence[int], coils: int, seed: int) -> NDArray[np.complex128]:
    coords = _coordinates(dims)
    width = max(dims) / 2
    rng = np.random.default_rng(seed)
    maps = np.empty((coils, *dims), dtype=np.complex128)
    for c, center in enumerate(_border_centers(dims, coils)):
        dist2 = sum((x - x0) ** 2 for x, x0 in zip(coords, center, strict=True))
        slopes = rng.uniform(-math.pi, math.pi, size=len(dims))
        offset = rng.uniform(-math.pi, math.pi)
        phase = offset + sum(s * x / n for s, x, n in zip(slopes, coords, dims, strict=True))
        maps[c] = np.exp(-dist2 / (2 * width**2)) * np.exp(1j * phase)
    return maps


def _birdcage_maps(dims: Sequence[int], coils: int) -> NDArray[np.complex128]:
    if len(dims) < 2:
        raise KddValidationError("Birdcage profile needs at least two spatial dimensions")
    ny, nz = dims[:2]
    y, z = np.meshgrid(
        (np.arange(ny) - ny / 2) / (ny / 2),
        (np.arange(nz) - nz / 2) / (nz / 2),
        indexing="ij",
    )
    radius = 1.5
    plane = np.empty((coils, ny, nz), dtype=np.complex128)
    for c in range(coils):
        angle = 2 * math.pi * c / coils
        dy = y - radius * math.sin(angle)
        dz = z - radius * math.cos(angle)
        rr = np.sqrt(dy**2 + dz**2)
        phi = np.arctan2(dz, -dy) - angle
        plane[c] = np.exp(1j * phi) / rr
    plane /= np.sqrt(np.sum(np.abs(plane) ** 2, axis=0))
    extra = tuple(dims[2:])
    return np.broadcast_to(plane.reshape(plane.shape + (1,) * len(extra)), (coils, *dims)).copy()


def synthetic_coils(
    dims: Sequence[int],
    coils: int,
    profile: CoilProfile | str = CoilProfile.GAUSSIAN,
    seed: int = 0,
    readout_axis: int | None = None,
) -> CoilMaps:
    """Smooth synthetic coil maps, deterministic for a given seed.

    The Gaussian profile places the coil centres equally spaced on the image
    border with isotropic width of half the image width and a random linear
    phase per coil. The birdcage profile places coils on a circle outside
    the image with a phase that rotates with the coil angle. A single coil
    degenerates to a constant map of magnitude 1.

    Args:
        dims: Spatial grid (readout included).
        coils: Number of coils C.
        profile: ``gaussian`` or ``birdcage``.
        seed: Seed for the random phases.
        readout_axis: Readout axis of ``dims``, if any.

    Returns:
        Coil maps of shape ``(C, *dims)``.

    Raises:
        KddValidationError: If ``coils`` is not positive.
    """
    if coils < 1:
        raise KddValidationError(f"Coil count must be positive, got {coils}")
    dims = tuple(int(n) for n in dims)
    if coils == 1:
        return CoilMaps(values=np.ones((1, *dims), dtype=np.complex128), readout_axis=readout_axis)
    if CoilProfile(profile) is CoilProfile.BIRDCAGE:
        values = _birdcage_maps(dims, coils)
    else:
        values = _gaussian_maps(dims, coils, seed)
    return CoilMaps(values=values, readout_axis=readout_axis)


def spline_basis(frames: int, size: int, order: int = 3, periodic: bool = True) -> TemporalBasis:
    """Shifted B-splines of the given order sampled on ``frames`` points.

    Shifts are equally spaced; every column is scaled to a peak of 1.

    Args:
        frames: Number of frames T.
        size: Number of basis functions L.
        order: Polynomial degree of the splines.
        periodic: Wrap the splines around the frame axis.

    Returns:
        The temporal basis.

    Raises:
        KddValidationError: If L > T, L < 1 or the order is negative.
    """
    if size < 1 or size > frames:
        raise KddValidationError(f"Basis size must be in 1..{frames}, got {size}")
    if order < 0:
        raise KddValidationError(f"Spline order must be nonnegative, got {order}")

    knots = np.arange(order + 2) - (order + 1) / 2
    cardinal = BSpline.basis_element(knots, extrapolate=False)
    t = np.arange(frames, dtype=np.float64)[:, None]

    if periodic:
        spacing = frames / size
        centers = np.arange(size) * spacing
        reach = math.ceil((order + 1) / 2 * spacing / frames) + 1
        values = np.zeros((frames, size))
        for m in range(-reach, reach + 1):
            values += np.nan_to_num(cardinal((t - centers + m * frames) / spacing))
    else:
        spacing = (frames - 1) / (size - 1) if size > 1 else float(frames)
        centers = np.arange(size) * spacing if size > 1 else np.array([(frames - 1) / 2])
        values = np.nan_to_num(cardinal((t - centers) / spacing))

    peaks = values.max(axis=0)
    if np.any(peaks <= 0):
        raise KddValidationError("Spline basis has an empty column; use fewer functions")
    return TemporalBasis(values=values / peaks)


def cross_support(dims: Sequence[int], seed: int = 0, jitter: float = 0.05) -> SupportMask:
    """Cross-shaped support that tiles the plane under quincunx shifts.

    A voxel belongs to the support when a cross-shaped ridge function,
    slightly jittered, is larger there than at the voxel shifted by half
    the grid in both directions. The half-period diagonal translate of the
    mask is therefore exactly its complement.

    Args:
        dims: Even 2-D grid ``(Ny, Nz)``.
        seed: Seed of the boundary jitter.
        jitter: Amplitude of the boundary jitter.

    Raises:
        KddValidationError: If the grid is not 2-D with even sizes.
    """
    if len(dims) != 2 or any(n % 2 for n in dims):
        raise KddValidationError(f"Cross support needs an even 2-D grid, got {tuple(dims)}")
    ny, nz = dims
    y, z = _coordinates(dims)
    ridge = np.maximum(
        np.exp(-(((y - ny / 2) / (ny / 8)) ** 2)),
        np.exp(-(((z - nz / 2) / (nz / 8)) ** 2)),
    )
    rng = np.random.default_rng(seed)
    score = ridge + jitter * rng.random(ridge.shape)

    shift = (-(ny // 2), -(nz // 2))
    partner = np.roll(score, shift, axis=(0, 1))
    index = np.arange(ny * nz).reshape(ny, nz)
    partner_index = np.roll(index, shift, axis=(0, 1))
    mask = (score > partner) | ((score == partner) & (index < partner_index))
    return SupportMask(values=mask)


def ellipse_support(
    dims: Sequence[int],
    semi_axes: tuple[float, float] = (0.42, 0.26),
    angle: float = math.pi / 6,
) -> SupportMask:
    """Rotated elliptical support; semi-axes are fractions of the grid size."""
    if len(dims) != 2:
        raise KddValidationError(f"Ellipse support needs a 2-D grid, got {tuple(dims)}")
    ny, nz = dims
    y, z = _coordinates(dims)
    u = (y - (ny - 1) / 2) / ny
    v = (z - (nz - 1) / 2) / nz
    a = u * math.cos(angle) + v * math.sin(angle)
    b = -u * math.sin(angle) + v * math.cos(angle)
    return SupportMask(values=(a / semi_axes[0]) ** 2 + (b / semi_axes[1]) ** 2 <= 1.0)


def synthetic_phantom(dims: Sequence[int]) -> NDArray[np.complex128]:
    """Smooth piecewise test object: an ellipse with two inner features."""
    coords = [(x - (n - 1) / 2) / n for x, n in zip(_coordinates(dims), dims, strict=True)]
    radius2 = sum((x / 0.4) ** 2 for x in coords)
    image = np.where(radius2 <= 1.0, 1.0, 0.0)
    first = coords[0]
    rest = sum(x**2 for x in coords[1:]) if len(coords) > 1 else 0.0
    image += 0.5 * np.exp(-(((first - 0.1) ** 2 + rest) / 0.004))
    image -= 0.3 * np.where(((first + 0.12) / 0.08) ** 2 + rest / 0.01 <= 1.0, 1.0, 0.0)
    return image.astype(np.complex128)
