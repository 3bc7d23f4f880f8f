"""Spectral moments of EᴴE and their dense oracle."""

from __future__ import annotations

import logging

import numpy as np

from ..const import DENSE_MAX_COLUMNS
from ..exceptions import KddDimensionError, KddSizeLimitError, KddValidationError
from ..grid import DifferentialDistribution, SamplingPattern, dd_fft
from ..sensitivity import SensitivitySet
from ..weighting import WeightFunction, collapse_readout, compute_w
from .models import DenseModel, VarianceBound

_LOGGER = logging.getLogger(__name__)


def build_dense(sens: SensitivitySet, pattern: SamplingPattern) -> DenseModel:
    """Assemble E = D·F·S explicitly with a unitary DFT.

    Args:
        sens: Sensitivity model.
        pattern: Sampling pattern on the model's phase-encode grid.

    Returns:
        The dense model; repeated samples appear as repeated rows.

    Raises:
        KddSizeLimitError: If N·L exceeds the desk-scale guard.
        KddDimensionError: If the pattern does not match the model.
    """
    columns = sens.voxels * sens.basis_size
    if columns > DENSE_MAX_COLUMNS:
        raise KddSizeLimitError(
            f"Dense model with N*L={columns} exceeds the limit of {DENSE_MAX_COLUMNS}",
            size=columns,
            limit=DENSE_MAX_COLUMNS,
        )
    counts = sens.expand_counts(pattern)
    dims = sens.spatial_dims
    voxels = sens.voxels
    positions = np.indices(dims).reshape(len(dims), -1)

    blocks = []
    frames, coils, locations = [], [], []
    for t in range(sens.frames):
        flat = counts[t].ravel()
        sampled = np.flatnonzero(flat)
        rows = np.repeat(sampled, flat[sampled])
        k = np.array(np.unravel_index(rows, dims)).reshape(len(dims), -1)
        phase = sum(
            np.outer(k[d], positions[d]) / dims[d] for d in range(len(dims))
        )
        fourier = np.exp(-2j * np.pi * phase) / np.sqrt(voxels)
        maps = sens.values[t].reshape(sens.basis_size, sens.coils, voxels)
        for c in range(sens.coils):
            block = fourier[:, None, :] * maps[None, :, c, :]
            blocks.append(block.reshape(len(rows), columns))
            frames.append(np.full(len(rows), t))
            coils.append(np.full(len(rows), c))
            locations.append(rows)

    encoding = np.concatenate(blocks) if blocks else np.zeros((0, columns), dtype=np.complex128)
    _LOGGER.debug("Built dense model with %d rows and %d columns", *encoding.shape)
    return DenseModel(
        encoding=encoding,
        gram=encoding.conj().T @ encoding,
        row_frames=np.concatenate(frames).astype(np.int64) if frames else np.zeros(0, np.int64),
        row_coils=np.concatenate(coils).astype(np.int64) if coils else np.zeros(0, np.int64),
        row_locations=(
            np.concatenate(locations).astype(np.int64) if locations else np.zeros(0, np.int64)
        ),
    )


def trace_moment1(sens: SensitivitySet, pattern: SamplingPattern) -> float:
    """tr(EᴴE) = Σ_{r,l,t,c} |S_{t,l,c}(r)|² · PSF_t(0).

    Args:
        sens: Sensitivity model.
        pattern: Sampling pattern on the model's phase-encode grid.

    Returns:
        The first spectral moment; independent of where the samples are.
    """
    if pattern.grid != sens.grid:
        raise KddDimensionError(
            "Pattern does not match the model grid",
            expected=sens.grid.count_shape,
            actual=pattern.grid.count_shape,
        )
    psf0 = pattern.totals / pattern.grid.size
    energy = np.sum(np.abs(sens.values) ** 2, axis=tuple(range(1, sens.values.ndim)))
    return float(np.dot(psf0, energy))


def trace_moment2(w: WeightFunction, p: DifferentialDistribution) -> float:
    """tr((EᴴE)²) = ⟨w, p⟩, scaled by the collapsed readout length.

    Raises:
        KddValidationError: If the weights still carry a readout dimension.
        KddDimensionError: If the shapes of ``w`` and ``p`` differ.
    """
    if w.readout_axis is not None:
        raise KddValidationError("Collapse the readout dimension before evaluating moments")
    if w.values.shape != p.values.shape:
        raise KddDimensionError(
            f"Weights {w.values.shape} and differential distribution "
            f"{p.values.shape} do not agree",
            expected=w.values.shape,
            actual=p.values.shape,
        )
    return float(np.sum(w.values * p.values)) * w.readout_length


def variance_bound(
    sens: SensitivitySet,
    pattern: SamplingPattern,
    w: WeightFunction | None = None,
) -> VarianceBound:
    """Compare tr((EᴴE)²) with its lower bound (tr EᴴE)² / dim.

    ``dim`` counts the columns of E that are not identically zero, i.e. the
    dimension of the space the Gram matrix acts on; for a model without
    zero columns this is N·L.

    Args:
        sens: Sensitivity model.
        pattern: Sampling pattern.
        w: Precomputed weights for ``sens``; computed when omitted.

    Returns:
        ``(moment2, lower_bound, gap)``; the gap vanishes exactly when all
        nonzero-column eigenvalues are equal.
    """
    if w is None:
        w = compute_w(sens)
        if w.readout_axis is not None:
            w = collapse_readout(w)
    moment2 = trace_moment2(w, dd_fft(pattern))
    lower = trace_moment1(sens, pattern) ** 2 / sens.active_columns()
    return VarianceBound(moment2=moment2, lower_bound=lower, gap=moment2 - lower)
