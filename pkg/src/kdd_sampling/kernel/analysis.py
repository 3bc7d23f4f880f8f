"""Kernel construction, the kernel route to w, power functions and rank correlation."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.stats import rankdata

from ..const import (
    KERNEL_MAX_ENTRIES,
    KERNEL_RIDGE,
    KERNEL_WARN_CONDITION,
    RANK_SPREAD_RTOL,
)
from ..exceptions import (
    KddConvergenceError,
    KddDimensionError,
    KddSizeLimitError,
    KddValidationError,
)
from ..grid import SamplingPattern
from ..sensitivity import SensitivitySet
from ..weighting import WeightFunction, symmetrize
from .models import KernelMatrix, PowerFunction

_LOGGER = logging.getLogger(__name__)

Values = Sequence[float] | NDArray[np.float64]


def _guard(size: int, what: str) -> None:
    if size > KERNEL_MAX_ENTRIES:
        raise KddSizeLimitError(
            f"{what} with {size} entries exceeds the limit of {KERNEL_MAX_ENTRIES}",
            size=size,
            limit=KERNEL_MAX_ENTRIES,
        )


def kernel(sens: SensitivitySet) -> KernelMatrix:
    """Reproducing kernel of the encoding model.

    K_{ct,c't'}(Δk) = (1/N) F{Σ_l S_{t,l,c} S*_{t',l,c'}}(Δk), the row Gram
    matrix E·Eᴴ of any pattern restricted to its sampled rows.

    Raises:
        KddSizeLimitError: If the table exceeds the kernel guard.
    """
    entries = (sens.frames * sens.coils) ** 2 * sens.voxels
    _guard(entries, "Kernel table")
    products = np.einsum("alc...,bld...->acbd...", sens.values, np.conj(sens.values))
    axes = tuple(range(4, products.ndim))
    table = np.fft.fftn(products, axes=axes) / sens.voxels
    return KernelMatrix(table=table)


def w_from_kernel(k: KernelMatrix, readout_axis: int | None = None) -> WeightFunction:
    """Weighting function w(Δk, t, t') = Σ_{c,c'} |K_{ct,c't'}(Δk)|²."""
    magnitude = k.table.real**2 + k.table.imag**2
    return WeightFunction(
        values=symmetrize(magnitude.sum(axis=(1, 3))), readout_axis=readout_axis
    )


def power_function(sens: SensitivitySet, pattern: SamplingPattern) -> PowerFunction:
    """Squared power function of kernel interpolation from the sampled rows.

    For every row x = (t, c, k), P²(x) = K(x, x) - κᴴ u with κ the kernel
    column between the sampled rows and x and u = G⁻¹κ the cardinal weights;
    G is the kernel restricted to the sampled rows (repeats counted once)
    plus a ridge of ``KERNEL_RIDGE`` times its mean diagonal. P² vanishes at
    sampled locations.

    Args:
        sens: Sensitivity model without a readout dimension.
        pattern: Sampling pattern.

    Returns:
        P² per coil and summed over coils.

    Raises:
        KddValidationError: If the model has a readout dimension or the
            pattern is empty.
        KddSizeLimitError: If the kernel or the evaluation exceeds its guard.
        KddConvergenceError: If the Gram matrix cannot be factorized.
    """
    if sens.readout_axis is not None:
        raise KddValidationError("Power functions need a model without a readout dimension")
    if pattern.total == 0:
        raise KddValidationError("Power function of an empty pattern is undefined")
    table = kernel(sens)
    grid = sens.grid
    if pattern.grid != grid:
        raise KddDimensionError(
            "Pattern does not match the model grid",
            expected=grid.count_shape,
            actual=pattern.grid.count_shape,
        )

    coils = sens.coils
    frames, locations = np.nonzero(pattern.counts.reshape(grid.frames, -1))
    sampled = (
        np.repeat(frames, coils),
        np.tile(np.arange(coils), frames.size),
        np.repeat(locations, coils),
    )
    count = frames.size * coils
    everything = (
        np.repeat(np.arange(grid.frames), coils * grid.size),
        np.tile(np.repeat(np.arange(coils), grid.size), grid.frames),
        np.tile(np.arange(grid.size), grid.frames * coils),
    )
    _guard(count * everything[0].size, "Power-function evaluation")

    gram = table.block(sampled, sampled)
    ridge = KERNEL_RIDGE * float(np.mean(np.diag(gram).real))
    eigenvalues = scipy.linalg.eigvalsh(gram)
    condition = float(eigenvalues[-1] / eigenvalues[0]) if eigenvalues[0] > 0 else float("inf")
    if condition > KERNEL_WARN_CONDITION:
        _LOGGER.warning("Power-function Gram is ill-conditioned (cond=%.3g)", condition)
    try:
        factor = scipy.linalg.cho_factor(gram + ridge * np.eye(count))
    except np.linalg.LinAlgError as err:
        raise KddConvergenceError(
            "Sampled kernel Gram matrix is not positive definite", condition=condition
        ) from err

    columns = table.block(sampled, everything)
    cardinal = scipy.linalg.cho_solve(factor, columns)
    diagonal = table.table.reshape(grid.frames, coils, grid.frames, coils, -1)[
        everything[0], everything[1], everything[0], everything[1], 0
    ]
    values = diagonal.real - np.sum(np.conj(columns) * cardinal, axis=0).real
    per_coil = values.reshape(grid.frames, coils, *grid.phase_dims)
    _LOGGER.debug(
        "Power function from %d sampled rows, cond=%.3g, min P²=%.3g",
        count,
        condition,
        float(values.min()),
    )
    return PowerFunction(
        grid=grid,
        per_coil=per_coil,
        combined=per_coil.sum(axis=1),
        condition=condition,
    )


def _flat(values: NDArray[np.float64]) -> bool:
    return bool(np.ptp(values) <= RANK_SPREAD_RTOL * np.abs(values).max())


def spearman(x: Values, y: Values) -> float:
    """Spearman rank correlation with average ranks for ties.

    An input whose spread is within ``RANK_SPREAD_RTOL`` of its largest
    magnitude counts as constant.

    Raises:
        KddValidationError: If the lengths differ, fewer than two values are
            given, or either input is constant.
    """
    a = np.asarray(x, dtype=float).ravel()
    b = np.asarray(y, dtype=float).ravel()
    if a.size != b.size:
        raise KddValidationError(f"Inputs differ in length: {a.size} and {b.size}")
    if a.size < 2:
        raise KddValidationError("Rank correlation needs at least two values")
    if _flat(a) or _flat(b):
        raise KddValidationError("Rank correlation of a constant input is undefined")
    return float(np.corrcoef(rankdata(a), rankdata(b))[0, 1])
