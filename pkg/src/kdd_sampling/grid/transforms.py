"""Point-spread functions and differential distributions.

DFT convention: the forward transform is unnormalized (``numpy.fft.fftn``)
and the inverse carries 1/N (``numpy.fft.ifftn``), so PSF_t(0) = N_t / N.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .models import DifferentialDistribution, GridShape, PointSpreadFunction, SamplingPattern


def _axes(grid: GridShape, lead: int) -> tuple[int, ...]:
    return tuple(range(lead, lead + grid.ndim))


def psf(pattern: SamplingPattern) -> PointSpreadFunction:
    """Compute the point-spread function of every frame.

    Args:
        pattern: The sampling pattern.

    Returns:
        Inverse DFT of each frame's count function.
    """
    values = np.fft.ifftn(pattern.counts.astype(np.float64), axes=_axes(pattern.grid, 1))
    return PointSpreadFunction(grid=pattern.grid, values=values)


def dd_direct(pattern: SamplingPattern) -> DifferentialDistribution:
    """Count ordered sample pairs by their difference (O(S²) reference).

    p(Δk, t, t') is the number of pairs (k from frame t, k' from frame t'),
    weighted by multiplicity, with k - k' = Δk modulo the grid.

    Args:
        pattern: The sampling pattern.

    Returns:
        The integer differential distribution.
    """
    grid = pattern.grid
    dims = np.asarray(grid.phase_dims)
    values = np.zeros(grid.pair_shape, dtype=np.int64)

    coords = [np.argwhere(frame > 0) for frame in pattern.counts]
    weights = [frame[frame > 0] for frame in pattern.counts]
    for t in range(grid.frames):
        for tp in range(grid.frames):
            if len(coords[t]) == 0 or len(coords[tp]) == 0:
                continue
            diff = (coords[t][:, None, :] - coords[tp][None, :, :]) % dims
            pair = weights[t][:, None] * weights[tp][None, :]
            np.add.at(values[t, tp], tuple(diff.reshape(-1, grid.ndim).T), pair.ravel())
    return DifferentialDistribution(grid=grid, values=values)


def dd_fft(pattern: SamplingPattern) -> DifferentialDistribution:
    """Differential distribution by FFT cross-correlation, rounded to integers.

    Args:
        pattern: The sampling pattern.

    Returns:
        The integer differential distribution; equal to :func:`dd_direct`.
    """
    grid = pattern.grid
    spectra = np.fft.fftn(pattern.counts.astype(np.float64), axes=_axes(grid, 1))
    cross = spectra[:, None] * np.conj(spectra[None, :])
    values = np.fft.ifftn(cross, axes=_axes(grid, 2)).real
    return DifferentialDistribution(grid=grid, values=np.rint(values).astype(np.int64))


def dd_from_psf(point_spread: PointSpreadFunction) -> DifferentialDistribution:
    """Differential distribution as N·F{PSF_t · conj(PSF_t')}, not rounded.

    Args:
        point_spread: Output of :func:`psf`.

    Returns:
        Real-valued differential distribution.
    """
    grid = point_spread.grid
    values = point_spread.values
    product: NDArray[np.complex128] = values[:, None] * np.conj(values[None, :])
    spectrum = np.fft.fftn(product, axes=_axes(grid, 2)) * grid.size
    return DifferentialDistribution(grid=grid, values=spectrum.real.copy())
