"""Computation of the weighting function and its surrogates."""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import NDArray

from ..exceptions import KddDimensionError, KddValidationError
from ..parallel import ordered_map
from ..sensitivity import CoilMaps, SensitivitySet, TemporalBasis
from .models import SparseWeight, WeightFunction, symmetrize

_LOGGER = logging.getLogger(__name__)


def _spatial_spectrum(products: NDArray[np.complex128], ndim: int) -> NDArray[np.float64]:
    """Σ over the two leading channel axes of |F{products}|²."""
    axes = tuple(range(2, 2 + ndim))
    spectrum = np.fft.fftn(products, axes=axes)
    return np.sum(spectrum.real**2 + spectrum.imag**2, axis=(0, 1))


def compute_w(sens: SensitivitySet, *, workers: int | None = None) -> WeightFunction:
    """Weighting function of a sensitivity model.

    w(Δk, t, t') = 1/N² Σ_{c,c'} |F{Σ_l S*_{t',l,c'} S_{t,l,c}}(Δk)|², with N the
    number of voxels. One job per frame pair; jobs run on a thread pool and
    are reduced in a fixed order, so the result does not depend on
    ``workers``.

    Args:
        sens: The sensitivity model.
        workers: Requested worker threads (capped by ``KDD_THREADS``).

    Returns:
        The weighting function on the full spatial grid; collapse it when the
        model carries a readout dimension.
    """
    values = sens.values
    ndim = len(sens.spatial_dims)
    pairs = [(t, tp) for t in range(sens.frames) for tp in range(sens.frames)]

    def job(pair: tuple[int, int]) -> NDArray[np.float64]:
        t, tp = pair
        products = np.einsum("lc...,ld...->cd...", values[t], np.conj(values[tp]))
        return _spatial_spectrum(products, ndim)

    _LOGGER.debug(
        "Computing w for T=%d, L=%d, C=%d on %s",
        sens.frames,
        sens.basis_size,
        sens.coils,
        sens.spatial_dims,
    )
    blocks = ordered_map(job, pairs, workers)
    stacked = np.stack(blocks).reshape(sens.frames, sens.frames, *sens.spatial_dims)
    return WeightFunction(
        values=symmetrize(stacked / float(sens.voxels) ** 2),
        readout_axis=sens.readout_axis,
        source_dims=sens.spatial_dims,
    )


def compute_w_separable(coils: CoilMaps, basis: TemporalBasis) -> WeightFunction:
    """Weighting function of a separable coil × temporal-basis model.

    w(Δk, t, t') = |Σ_l β_l(t) β*_l(t')|² · 1/N² Σ_{c,c'} |F{C*_{c'} C_c}(Δk)|².

    Args:
        coils: Coil maps.
        basis: Temporal basis.

    Returns:
        The weighting function; equals :func:`compute_w` of
        ``from_coils_and_basis(coils, basis)``.
    """
    beta = np.asarray(basis.values, dtype=np.complex128)
    gram = beta @ beta.conj().T
    temporal = gram.real**2 + gram.imag**2

    maps = coils.values
    products = maps[:, None] * np.conj(maps[None, :])
    spatial = _spatial_spectrum(products, len(coils.spatial_dims))
    voxels = float(np.prod(coils.spatial_dims))

    expand = (slice(None), slice(None)) + (None,) * len(coils.spatial_dims)
    return WeightFunction(
        values=symmetrize(temporal[expand] * (spatial / voxels**2)[None, None]),
        readout_axis=coils.readout_axis,
        source_dims=coils.spatial_dims,
    )


def collapse_readout(w3d: WeightFunction) -> WeightFunction:
    """Sum the weights along the readout offset.

    The result lives on the phase-encode grid and remembers the readout
    length, so ⟨w, p⟩ on the phase-encode plane equals the full ⟨w, p⟩ of
    a pattern with the readout fully sampled.

    Raises:
        KddValidationError: If ``w3d`` has no readout dimension.
    """
    if w3d.readout_axis is None:
        raise KddValidationError("Weights have no readout dimension to collapse")
    axis = 2 + w3d.readout_axis
    length = w3d.values.shape[axis]
    return WeightFunction(
        values=symmetrize(w3d.values.sum(axis=axis)),
        readout_length=w3d.readout_length * int(length),
        source_dims=w3d.source_dims,
    )


def threshold_w(w: WeightFunction, keep: int | float) -> SparseWeight:
    """Keep the largest weights, always including the (0, t, t) self terms.

    The self terms are retained first and the remaining ``keep - T`` slots go
    to the largest other entries; ties are broken by the lexicographic
    (t, t', Δk) index.

    Args:
        w: Dense weighting function on the phase-encode grid.
        keep: Entry count, or a fraction in (0, 1] of all entries.

    Returns:
        The sparse surrogate.

    Raises:
        KddValidationError: If fewer than T entries are requested.
    """
    grid = w.grid
    flat = w.values.ravel()
    total = flat.size

    if isinstance(keep, float):
        if not 0.0 < keep <= 1.0:
            raise KddValidationError(f"Fractional keep must be in (0, 1], got {keep}")
        count = math.ceil(keep * total)
    else:
        count = int(keep)
    if count < grid.frames:
        raise KddValidationError(f"keep={count} cannot retain the {grid.frames} self terms")
    if count > total:
        _LOGGER.warning("keep=%d exceeds the %d weight entries; keeping all", count, total)
        count = total

    diagonal = np.array([(t * grid.frames + t) * grid.size for t in range(grid.frames)])
    order = np.argsort(-flat, kind="stable")
    others = order[~np.isin(order, diagonal)][: count - grid.frames]
    retained = np.sort(np.concatenate([diagonal, others]))

    index = np.unravel_index(retained, w.values.shape)
    if len(index) - 2 != grid.ndim:
        raise KddDimensionError("Weights do not match their phase-encode grid")
    _LOGGER.debug("Thresholded w to %d of %d entries", len(retained), total)
    return SparseWeight(
        grid=grid,
        offsets=np.stack(index[2:], axis=1).astype(np.int64),
        frames_t=index[0].astype(np.int64),
        frames_tp=index[1].astype(np.int64),
        values=flat[retained].copy(),
        readout_length=w.readout_length,
    )
