"""Best-candidate greedy design by incremental ΔJ updates."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from ..exceptions import KddDimensionError, KddValidationError
from ..grid import GridShape, SamplingPattern, dd_fft
from ..grid.models import Index, Sample
from ..spectral import trace_moment2
from ..weighting import SparseWeight, WeightFunction
from .models import DeltaJMap, DesignConfig
from .queue import (
    CandidateQueue,
    block_after_insert,
    candidate_ranks,
    check_capacity,
    initial_blocked,
)

_LOGGER = logging.getLogger(__name__)

Weights = WeightFunction | SparseWeight
StepCallback = Callable[[int, Sample, DeltaJMap], None]


def _self_terms(w: Weights) -> NDArray[np.float64]:
    """w(0, t, t) for every frame, readout scaling applied."""
    grid = w.grid
    if isinstance(w, WeightFunction):
        origin = (0,) * grid.ndim
        return np.array([w.effective[(t, t, *origin)] for t in range(grid.frames)])
    diagonal = np.zeros(grid.frames)
    at_origin = (w.frames_t == w.frames_tp) & np.all(w.offsets == 0, axis=1)
    diagonal[w.frames_t[at_origin]] = w.effective[at_origin]
    return diagonal


def delta_j_init(w: Weights) -> DeltaJMap:
    """ΔJ map of the empty pattern: ΔJ(k, t) = w(0, t, t) and J = 0."""
    grid = w.grid
    diagonal = _self_terms(w)
    values = np.broadcast_to(diagonal.reshape((-1,) + (1,) * grid.ndim), grid.count_shape)
    return DeltaJMap(grid=grid, values=values.copy(), objective=0.0)


def delta_j_from_pattern(w: Weights, pattern: SamplingPattern) -> DeltaJMap:
    """Recompute ΔJ from scratch for an arbitrary pattern.

    ΔJ(k', t') = w(0, t', t') + 2 Σ_t Σ_k s_t(k)·w(k' - k, t', t), evaluated as
    a circular convolution; J is ⟨w, p⟩ of the pattern.
    """
    dense = w.to_dense() if isinstance(w, SparseWeight) else w
    grid = dense.grid
    if pattern.grid != grid:
        raise KddDimensionError(
            "Pattern does not match the weights",
            expected=grid.count_shape,
            actual=pattern.grid.count_shape,
        )
    axes = tuple(range(1, 1 + grid.ndim))
    spectra = np.fft.fftn(pattern.counts.astype(np.float64), axes=axes)
    kernels = np.fft.fftn(dense.effective, axes=tuple(range(2, 2 + grid.ndim)))
    mixed = np.einsum("ab...,b...->a...", kernels, spectra)
    convolution = np.fft.ifftn(mixed, axes=axes).real
    diagonal = _self_terms(dense).reshape((-1,) + (1,) * grid.ndim)
    return DeltaJMap(
        grid=grid,
        values=diagonal + 2.0 * convolution,
        objective=trace_moment2(dense, dd_fft(pattern)),
    )


def _apply_dense(
    state: DeltaJMap, w: WeightFunction, k: tuple[int, ...], t: int, sign: float
) -> None:
    axes = tuple(range(1, 1 + state.grid.ndim))
    shifted = np.roll(w.effective[:, t], k, axis=axes)
    if sign > 0:
        state.values += shifted + shifted
    else:
        state.values -= shifted + shifted


def _apply_sparse(
    state: DeltaJMap, w: SparseWeight, k: tuple[int, ...], t: int, sign: float
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    frames, offsets, increments = w.stencil(t)
    dims = np.asarray(state.grid.phase_dims)
    targets = (offsets + np.asarray(k)) % dims
    index = (frames, *targets.T)
    if sign > 0:
        state.values[index] += increments
    else:
        state.values[index] -= increments
    return frames, np.ravel_multi_index(tuple(targets.T), state.grid.phase_dims)


def _apply(
    state: DeltaJMap, w: Weights, k: tuple[int, ...], t: int, sign: float
) -> tuple[NDArray[np.int64], NDArray[np.int64]] | None:
    if isinstance(w, SparseWeight):
        return _apply_sparse(state, w, k, t, sign)
    _apply_dense(state, w, k, t, sign)
    return None


def _check_state(state: DeltaJMap, pattern: SamplingPattern, w: Weights) -> GridShape:
    grid = w.grid
    if state.grid != grid or pattern.grid != grid:
        raise KddDimensionError(
            "State, pattern and weights must share one grid",
            expected=grid.count_shape,
            actual=pattern.grid.count_shape,
        )
    return grid


def insert_sample(
    state: DeltaJMap,
    pattern: SamplingPattern,
    w: Weights,
    sample: tuple[Index, int],
    *,
    quotas: Sequence[int] | None = None,
    allow_repeats: bool = True,
) -> DeltaJMap:
    """Insert sample (k', t'), updating the pattern and ΔJ map in place.

    J grows by the pre-insertion ΔJ(k', t') and every ΔJ(k, t) grows by
    2·w(k - k', t, t'). With a :class:`SparseWeight` only the retained
    support is touched.

    Args:
        state: ΔJ map consistent with ``pattern``.
        pattern: Pattern to extend.
        w: Dense or thresholded weights.
        sample: ``(k', t')``.
        quotas: Per-frame sample quotas, if active.
        allow_repeats: Whether an already sampled (k', t') may be chosen again.

    Returns:
        The updated state.

    Raises:
        KddValidationError: On a quota violation or a forbidden repeat.
    """
    grid = _check_state(state, pattern, w)
    k_raw, t = sample
    k = grid.wrap(k_raw)
    present = pattern.count(k, t)
    if quotas is not None and pattern.totals[t] >= quotas[t]:
        raise KddValidationError(f"Quota of {quotas[t]} samples for frame {t} is exhausted")
    if not allow_repeats and present > 0:
        raise KddValidationError(f"Repeat at k={k}, t={t} is not allowed")

    state.objective += float(state.values[(t, *k)])
    pattern.add(k, t)
    _apply(state, w, k, t, +1.0)
    return state


def remove_sample(
    state: DeltaJMap,
    pattern: SamplingPattern,
    w: Weights,
    sample: tuple[Index, int],
) -> DeltaJMap:
    """Remove sample (k', t'); the exact inverse of :func:`insert_sample`.

    Raises:
        KddValidationError: If (k', t') holds no sample.
    """
    grid = _check_state(state, pattern, w)
    k_raw, t = sample
    k = grid.wrap(k_raw)
    pattern.remove(k, t)
    _apply(state, w, k, t, -1.0)
    state.objective -= float(state.values[(t, *k)])
    return state


def exact_best_candidate(
    w: WeightFunction,
    config: DesignConfig,
    *,
    on_step: StepCallback | None = None,
) -> SamplingPattern:
    """Greedy design scanning the full ΔJ map at every step.

    Each step inserts the unblocked candidate with the smallest ΔJ; ties go
    to the smallest tie-break rank. Frames whose quota is met and, without
    repeats, already sampled candidates are blocked.

    Args:
        w: Weights on the phase-encode grid.
        config: Design settings.
        on_step: Called after each insertion with the step number, the
            sample and the state.

    Returns:
        The designed pattern.
    """
    grid = w.grid
    check_capacity(grid, config)
    state = delta_j_init(w)
    pattern = SamplingPattern.empty(grid)
    ranks = candidate_ranks(grid, config)
    blocked = initial_blocked(grid, config)

    for step in range(config.total):
        masked = np.where(blocked, np.inf, state.flat)
        best = masked.min()
        if not np.isfinite(best):
            raise KddValidationError("No eligible sample candidates remain")
        frames, indices = np.nonzero(masked == best)
        choice = int(np.argmin(ranks[frames, indices]))
        t, index = int(frames[choice]), int(indices[choice])
        k = grid.unravel(index)
        insert_sample(state, pattern, w, (k, t))
        block_after_insert(blocked, pattern, config, t, index)
        if on_step is not None:
            on_step(step, (k, t), state)

    _LOGGER.debug("Exact design placed %d samples, J=%.12g", config.total, state.objective)
    return pattern


def approx_best_candidate(
    w_hat: SparseWeight,
    config: DesignConfig,
    *,
    on_step: StepCallback | None = None,
) -> SamplingPattern:
    """Greedy design with a thresholded surrogate and a priority queue.

    Only the support of ``w_hat`` is updated after each insertion and only
    the touched candidates are re-queued. With a full-support surrogate the
    sample sequence is identical to :func:`exact_best_candidate`.

    Args:
        w_hat: Thresholded weights.
        config: Design settings.
        on_step: Called after each insertion with the step number, the
            sample and the state.

    Returns:
        The designed pattern.
    """
    grid = w_hat.grid
    check_capacity(grid, config)
    state = delta_j_init(w_hat)
    pattern = SamplingPattern.empty(grid)
    ranks = candidate_ranks(grid, config)
    blocked = initial_blocked(grid, config)
    queue = CandidateQueue(state.flat, ranks)

    for step in range(config.total):
        t, index = queue.pop(blocked)
        k = grid.unravel(index)
        state.objective += float(state.values[(t, *k)])
        pattern.add(k, t)
        frames, indices = _apply_sparse(state, w_hat, k, t, +1.0)
        queue.push_many(frames, indices)
        block_after_insert(blocked, pattern, config, t, index)
        if not blocked[t, index]:
            queue.push(t, index)
        if on_step is not None:
            on_step(step, (k, t), state)

    _LOGGER.debug(
        "Approximate design placed %d samples with supp=%d, J=%.12g",
        config.total,
        w_hat.support_size,
        state.objective,
    )
    return pattern
