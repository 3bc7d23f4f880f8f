"""Builders for the support, parallel-imaging and temporal-basis models."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ..exceptions import KddDimensionError
from .models import CoilMaps, SensitivitySet, SupportMask, TemporalBasis


def from_support(
    mask: SupportMask | NDArray[np.bool_],
    readout_axis: int | None = None,
) -> SensitivitySet:
    """Support-constrained model: T = L = C = 1 and S is the mask indicator.

    Raises:
        KddValidationError: If the mask is empty.
    """
    support = mask if isinstance(mask, SupportMask) else SupportMask(values=np.asarray(mask))
    values = support.values.astype(np.complex128)[None, None, None]
    return SensitivitySet(values=values, readout_axis=readout_axis)


def from_coils(coils: CoilMaps) -> SensitivitySet:
    """Parallel-imaging model: T = L = 1, one sensitivity per coil."""
    return SensitivitySet(values=coils.values[None, None].copy(), readout_axis=coils.readout_axis)


def from_coils_and_basis(coils: CoilMaps, basis: TemporalBasis) -> SensitivitySet:
    """Temporal-basis model S_{t,l,c}(r) = C(r, c)·β_l(t).

    Args:
        coils: Coil maps, shape ``(C, *spatial)``.
        basis: Temporal basis, shape ``(T, L)``.

    Returns:
        Sensitivities of shape ``(T, L, C, *spatial)``.
    """
    beta = np.asarray(basis.values, dtype=np.complex128)
    if beta.ndim != 2:
        raise KddDimensionError("Temporal basis must be 2-D")
    expand = (slice(None), slice(None), None) + (None,) * len(coils.spatial_dims)
    values = beta[expand] * coils.values[None, None]
    return SensitivitySet(values=values, readout_axis=coils.readout_axis)
