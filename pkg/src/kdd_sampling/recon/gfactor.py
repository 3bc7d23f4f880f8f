"""g-factor maps: pseudo multiple replica estimate and the dense covariance limit."""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from ..const import DEFAULT_CG_MAX_ITER, DEFAULT_CG_TOL, DEFAULT_LAMBDA, DEFAULT_REPLICAS
from ..exceptions import KddValidationError
from ..grid import SamplingPattern
from ..parallel import ordered_map
from ..sensitivity import SensitivitySet
from ..spectral import build_dense
from .models import GFactorMap
from .operators import white_noise
from .solver import cg_solve

_LOGGER = logging.getLogger(__name__)


def _ratio(
    accelerated: NDArray[np.float64],
    full: NDArray[np.float64],
    acceleration: float,
) -> NDArray[np.float64]:
    """σ_accel / (σ_full·√R), zero where σ_full vanishes."""
    g = np.zeros_like(full)
    region = full > 0
    g[region] = accelerated[region] / (full[region] * np.sqrt(acceleration))
    return g


def pseudo_replica_gfactor(
    sens: SensitivitySet,
    pattern: SamplingPattern,
    lam: float = DEFAULT_LAMBDA,
    *,
    replicas: int = DEFAULT_REPLICAS,
    tol: float = DEFAULT_CG_TOL,
    max_iter: int = DEFAULT_CG_MAX_ITER,
    seed: int = 0,
    workers: int | None = None,
) -> GFactorMap:
    """Estimate g by reconstructing pure-noise data many times.

    Each replica draws unit-variance complex white noise for the accelerated
    and the fully sampled pattern from its own seeded stream and solves both
    with the same λ. The per-voxel standard deviations combine into
    g = σ_accel / (σ_full·√R) with R = N·T / Σ N_t. Replicas run on a thread
    pool and are accumulated in replica order.

    Args:
        sens: Sensitivity model.
        pattern: Accelerated pattern.
        lam: Tikhonov weight for both reconstructions.
        replicas: Number of noise realizations (at least 2).
        tol: CG stopping threshold.
        max_iter: CG iteration limit.
        seed: Root seed of the replica streams.
        workers: Requested worker threads (capped by ``KDD_THREADS``).

    Returns:
        g per coefficient image.

    Raises:
        KddValidationError: If fewer than 2 replicas are requested or the
            pattern holds no samples.
    """
    if replicas < 2:
        raise KddValidationError(f"At least 2 replicas are needed, got {replicas}")
    if pattern.total == 0:
        raise KddValidationError("Cannot estimate g for an empty pattern")
    full = SamplingPattern.full(pattern.grid)
    streams = np.random.SeedSequence(seed).spawn(replicas)

    def replica(stream: np.random.SeedSequence) -> tuple[NDArray[np.complex128], ...]:
        rng = np.random.default_rng(stream)
        results = []
        for target in (pattern, full):
            noise = white_noise(sens, target, rng)
            results.append(cg_solve(sens, target, noise, lam, tol=tol, max_iter=max_iter).values)
        return tuple(results)

    outputs = ordered_map(replica, streams, workers)
    stds = []
    for index in range(2):
        total = np.zeros((sens.basis_size, *sens.spatial_dims), dtype=np.complex128)
        squares = np.zeros(total.shape)
        for output in outputs:
            total += output[index]
            squares += np.abs(output[index]) ** 2
        variance = (squares - np.abs(total) ** 2 / replicas) / (replicas - 1)
        stds.append(np.sqrt(np.maximum(variance, 0.0)))

    acceleration = pattern.acceleration
    _LOGGER.debug("Pseudo-replica g-factor from %d replicas at R=%.3g", replicas, acceleration)
    return GFactorMap(
        values=_ratio(stds[0], stds[1], acceleration),
        acceleration=acceleration,
        replicas=replicas,
    )


def _noise_std(sens: SensitivitySet, pattern: SamplingPattern, lam: float) -> NDArray[np.float64]:
    """Standard deviation of every (l, r) in the regularized solution.

    The noise covariance is (G + λI)⁻¹G(G + λI)⁻¹ with G = EᴴE; with
    G = VΛVᴴ its diagonal is Σ_i |V_{ri}|²·λ_i/(λ_i + λ)².
    """
    gram = build_dense(sens, pattern).gram
    eigenvalues, vectors = scipy.linalg.eigh(gram)
    eigenvalues = np.maximum(eigenvalues, 0.0)
    shifted = (eigenvalues + lam) ** 2
    scale = np.divide(eigenvalues, shifted, out=np.zeros_like(eigenvalues), where=shifted > 0)
    variance = (np.abs(vectors) ** 2) @ scale
    return np.sqrt(variance).reshape(sens.basis_size, *sens.spatial_dims)


def analytic_gfactor(
    sens: SensitivitySet,
    pattern: SamplingPattern,
    lam: float = DEFAULT_LAMBDA,
) -> GFactorMap:
    """Exact g of the regularized solution from the dense model.

    This is the limit of :func:`pseudo_replica_gfactor` for infinitely many
    replicas.

    Raises:
        KddSizeLimitError: If the dense model exceeds its guard.
        KddValidationError: If ``lam`` is negative or the pattern is empty.
    """
    if lam < 0:
        raise KddValidationError(f"λ must be nonnegative, got {lam}")
    if pattern.total == 0:
        raise KddValidationError("Cannot compute g for an empty pattern")
    accelerated = _noise_std(sens, pattern, lam)
    full = _noise_std(sens, SamplingPattern.full(pattern.grid), lam)
    return GFactorMap(
        values=_ratio(accelerated, full, pattern.acceleration),
        acceleration=pattern.acceleration,
    )
