"""Forward greedy design minimizing the Tikhonov-regularized MSE tr((EᴴE + λI)⁻¹)."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from ..const import MSE_LAMBDA_FACTOR, MSE_MAX_COLUMNS, MSE_TIE_RTOL
from ..exceptions import KddSizeLimitError, KddValidationError
from ..grid import SamplingPattern
from ..grid.models import Sample
from ..sensitivity import SensitivitySet
from ..spectral import build_dense
from .models import DesignConfig
from .queue import block_after_insert, candidate_ranks, check_capacity, initial_blocked

_LOGGER = logging.getLogger(__name__)

MseCallback = Callable[[int, Sample, float], None]


def _check_size(sens: SensitivitySet) -> None:
    columns = sens.voxels * sens.basis_size
    if columns > MSE_MAX_COLUMNS:
        raise KddSizeLimitError(
            f"MSE design with N*L={columns} exceeds the limit of {MSE_MAX_COLUMNS}",
            size=columns,
            limit=MSE_MAX_COLUMNS,
        )


def default_lambda(sens: SensitivitySet) -> float:
    """λ = MSE_LAMBDA_FACTOR times the mean diagonal of the fully sampled Gram matrix.

    Raises:
        KddValidationError: If the sensitivities vanish everywhere.
    """
    diagonal = np.sum(np.abs(sens.values) ** 2, axis=(0, 2))
    mean = float(diagonal.mean())
    if mean <= 0:
        raise KddValidationError("Sensitivities vanish; cannot derive a regularization weight")
    return MSE_LAMBDA_FACTOR * mean


def mse_objective(sens: SensitivitySet, pattern: SamplingPattern, lam: float) -> float:
    """tr((EᴴE + λI)⁻¹) from the dense model.

    Raises:
        KddValidationError: If ``lam`` is not positive.
        KddSizeLimitError: If the dense model exceeds its guard.
    """
    if lam <= 0:
        raise KddValidationError(f"λ must be positive, got {lam}")
    eigenvalues = build_dense(sens, pattern).eigenvalues(shift=lam)
    return float(np.sum(1.0 / eigenvalues))


def _hybrid_rows(sens: SensitivitySet) -> NDArray[np.complex128]:
    """Encoding rows of every candidate in every readout slice.

    With the readout fully sampled, a unitary transform along it splits E
    into independent blocks, one per readout position x. The result has
    shape ``(X, T·N, C, L·N)`` with candidates ordered (t, k) and columns
    (l, r).
    """
    values = sens.values
    if sens.readout_axis is not None:
        values = np.moveaxis(values, 3 + sens.readout_axis, 0)
    else:
        values = values[None]

    dims = sens.phase_dims
    size = int(np.prod(dims))
    positions = np.indices(dims).reshape(len(dims), -1)
    phase = sum(np.outer(positions[d], positions[d]) / dims[d] for d in range(len(dims)))
    fourier = np.exp(-2j * np.pi * phase) / np.sqrt(size)

    slices, frames, basis, coils = values.shape[:4]
    maps = values.reshape(slices, frames, basis, coils, size)
    rows = np.einsum("kr,xtlcr->xtkclr", fourier, maps)
    return rows.reshape(slices, frames * size, coils, basis * size)


def _gains(
    rows: NDArray[np.complex128], inverses: NDArray[np.complex128]
) -> NDArray[np.float64]:
    """Decrease of Σ_x tr(M_x) for adding each candidate's rows.

    For rows U and M = (G + λI)⁻¹, the decrease is tr((I + UMUᴴ)⁻¹ UMMUᴴ).
    """
    coils = rows.shape[2]
    identity = np.eye(coils)
    total = np.zeros(rows.shape[1])
    for block, inverse in zip(rows, inverses, strict=True):
        projected = block @ inverse
        inner = np.einsum("kcn,kdn->kcd", projected, block.conj())
        outer = np.einsum("kcn,kdn->kcd", projected, projected.conj())
        solved = np.linalg.solve(identity + inner, outer)
        total += np.trace(solved, axis1=1, axis2=2).real
    return total


def _update(
    inverses: NDArray[np.complex128], rows: NDArray[np.complex128], candidate: int
) -> None:
    """Woodbury update M ← M − Bᴴ(I + BUᴴ)⁻¹B with B = UM, in place."""
    identity = np.eye(rows.shape[2])
    for x, inverse in enumerate(inverses):
        block = rows[x, candidate]
        projected = block @ inverse
        inner = identity + projected @ block.conj().T
        inverses[x] -= projected.conj().T @ np.linalg.solve(inner, projected)


def greedy_mse(
    sens: SensitivitySet,
    config: DesignConfig,
    *,
    lam: float | None = None,
    on_step: MseCallback | None = None,
) -> SamplingPattern:
    """Greedy design adding, at each step, the sample that most reduces the MSE.

    The objective is tr((EᴴE + λI)⁻¹); the inverse is kept per readout slice
    and updated with the Woodbury identity. Gains within a relative
    ``MSE_TIE_RTOL`` of the best count as ties and go to the smallest
    tie-break rank.

    Args:
        sens: Sensitivity model.
        config: Design settings.
        lam: Regularization weight; :func:`default_lambda` when omitted.
        on_step: Called after each insertion with the step number, the
            sample and the current objective.

    Returns:
        The designed pattern.

    Raises:
        KddSizeLimitError: If N·L exceeds the MSE guard.
        KddValidationError: If ``lam`` is not positive.
    """
    _check_size(sens)
    grid = sens.grid
    check_capacity(grid, config)
    weight = default_lambda(sens) if lam is None else lam
    if weight <= 0:
        raise KddValidationError(f"λ must be positive, got {weight}")

    rows = _hybrid_rows(sens)
    slices, _, _, columns = rows.shape
    inverses = np.tile(np.eye(columns, dtype=np.complex128) / weight, (slices, 1, 1))
    objective = slices * columns / weight

    # candidates are ordered (t, k); ranks are stored (T, N)
    ranks = candidate_ranks(grid, config).ravel()
    blocked = initial_blocked(grid, config)
    pattern = SamplingPattern.empty(grid)

    for step in range(config.total):
        gains = _gains(rows, inverses)
        eligible = ~blocked.ravel()
        if not eligible.any():
            raise KddValidationError("No eligible sample candidates remain")
        best = gains[eligible].max()
        tied = np.flatnonzero(eligible & (gains >= best - MSE_TIE_RTOL * abs(best)))
        candidate = int(tied[np.argmin(ranks[tied])])
        t, index = divmod(candidate, grid.size)
        k = grid.unravel(index)

        _update(inverses, rows, candidate)
        pattern.add(k, t)
        block_after_insert(blocked, pattern, config, t, index)
        objective -= float(gains[candidate])
        if on_step is not None:
            on_step(step, (k, t), objective)

    _LOGGER.debug(
        "MSE design placed %d samples with λ=%.4g, tr((EᴴE+λI)⁻¹)=%.6g",
        config.total,
        weight,
        objective,
    )
    return pattern
