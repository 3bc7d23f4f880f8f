"""Multi-stage experiment pipelines driven by an :class:`ExperimentConfig`."""

from __future__ import annotations

import logging
import math
import time
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
from pydantic import BaseModel, ValidationError

from .config import DesignArm, ExperimentConfig, ModelSection, ReconSection
from .const import CONSISTENCY_RTOL, Algorithm, ModelKind, SupportProfile
from .design import (
    DeltaJMap,
    DesignConfig,
    approx_best_candidate,
    exact_best_candidate,
    greedy_mse,
    poisson_disc,
    uniform_pattern,
    uniform_random,
)
from .exceptions import KddConfigError, KddConsistencyError, KddValidationError
from .formats import emit_csv, emit_map, load_sensitivity, write_pattern
from .grid import GridShape, SamplingPattern, dd_fft
from .grid.models import Sample
from .recon import (
    GFactorMap,
    Image,
    analytic_gfactor,
    apply_E,
    cg_solve,
    gfactor_stats,
    metrics,
    pseudo_replica_gfactor,
)
from .sensitivity import (
    SensitivitySet,
    SupportMask,
    cross_support,
    ellipse_support,
    from_coils,
    from_coils_and_basis,
    from_support,
    spline_basis,
    synthetic_coils,
    synthetic_phantom,
)
from .spectral import trace_moment2
from .weighting import WeightFunction, collapse_readout, compute_w, threshold_w

_LOGGER = logging.getLogger(__name__)


class DesignOutcome(NamedTuple):
    """A designed pattern, its objective J = ⟨w, p⟩ and the design wall time."""

    pattern: SamplingPattern
    objective: float
    seconds: float


class ReportRow(BaseModel):
    """One line of the pattern comparison table."""

    model_config = {"frozen": True}

    design: str
    algorithm: str
    samples: int
    acceleration: float
    objective: float
    objective_rel: float
    mse: float
    mse_rel: float
    max_g: float
    median_g: float
    design_seconds: float


def _support(model: ModelSection) -> SupportMask | None:
    if model.support is SupportProfile.FULL:
        return None
    if model.support is SupportProfile.CROSS:
        plane = cross_support(model.phase_dims, seed=model.seed)
    else:
        plane = ellipse_support(model.phase_dims)
    if model.readout_length is None:
        return plane
    stacked = np.broadcast_to(plane.values[None], model.spatial_dims)
    return SupportMask(values=stacked.copy())


def build_sensitivity(model: ModelSection) -> SensitivitySet:
    """Sensitivity set described by a model section.

    A ``sensitivity_path`` loads a stored container; otherwise the model is
    synthesized from the support profile, the coil profile and, for
    ``coils+basis``, a periodic spline basis.

    Raises:
        FileNotFoundError: If the referenced container does not exist.
        KddValidationError: If the synthetic model cannot be built.
    """
    if model.sensitivity_path is not None:
        _LOGGER.debug("Loading sensitivities from %s", model.sensitivity_path)
        return load_sensitivity(model.sensitivity_path)

    support = _support(model)
    if model.kind is ModelKind.SUPPORT:
        mask = support if support is not None else np.ones(model.spatial_dims, dtype=bool)
        return from_support(mask, readout_axis=model.readout_axis)

    coils = synthetic_coils(
        model.spatial_dims,
        model.coils,
        model.coil_profile,
        seed=model.seed,
        readout_axis=model.readout_axis,
    ).normalized(support)
    if model.kind is ModelKind.COILS:
        return from_coils(coils)

    # the validator guarantees a basis size for coils+basis
    size = model.basis_size or 1
    basis = spline_basis(model.frames, size, model.basis_order)
    return from_coils_and_basis(coils, basis)


def model_weights(sens: SensitivitySet, *, workers: int | None = None) -> WeightFunction:
    """Weights on the phase-encode grid, the readout collapsed when present."""
    w = compute_w(sens, workers=workers)
    return collapse_readout(w) if w.readout_axis is not None else w


def design_config(arm: DesignArm, grid: GridShape) -> DesignConfig:
    """Greedy design settings of an arm on ``grid``.

    Raises:
        KddConfigError: If the arm's quotas disagree with its sample count.
    """
    total = arm.sample_count(grid.size * grid.frames)
    options: dict[str, Any] = {
        "tie_break": arm.tie_break,
        "allow_repeats": arm.allow_repeats,
        "seed": arm.seed,
    }
    try:
        if arm.even_quotas:
            return DesignConfig.even_quotas(total, grid.frames, **options)
        return DesignConfig(total=total, quotas=arm.quotas, **options)
    except ValidationError as err:
        raise KddConfigError(f"Design arm {arm.name!r}: {err}") from err


def check_objective(w: WeightFunction, pattern: SamplingPattern, running: float) -> float:
    """Recompute J = ⟨w, p⟩ and compare it with the value tracked while designing.

    Returns:
        The recomputed objective.

    Raises:
        KddConsistencyError: If the two disagree beyond ``CONSISTENCY_RTOL``.
    """
    objective = trace_moment2(w, dd_fft(pattern))
    scale = max(abs(objective), abs(running), 1.0)
    if abs(objective - running) > CONSISTENCY_RTOL * scale:
        raise KddConsistencyError(
            f"Running objective {running!r} disagrees with recomputed {objective!r}"
        )
    return objective


def run_design(
    arm: DesignArm,
    w: WeightFunction,
    *,
    sens: SensitivitySet | None = None,
    lam: float | None = None,
) -> DesignOutcome:
    """Run one design arm and score the pattern.

    Args:
        arm: Generator and its parameters.
        w: Weights on the phase-encode grid.
        sens: Sensitivity model; required by the MSE comparator only.
        lam: Regularization of the MSE comparator; its default when omitted.

    Returns:
        Pattern, objective and design wall time.

    Raises:
        KddConsistencyError: If a greedy run's tracked J does not match the
            recomputed one.
        KddValidationError: If the MSE comparator is run without a model.
    """
    grid = w.grid
    tracked: list[float] = []

    def record(_step: int, _sample: Sample, state: DeltaJMap) -> None:
        tracked[:] = [state.objective]

    start = time.perf_counter()
    algorithm = arm.algorithm
    # weights whose ⟨w, p⟩ the greedy designers track while inserting
    tracked_w: WeightFunction | None = None
    if algorithm is Algorithm.UNIFORM:
        pattern = uniform_pattern(grid, arm.r_y, arm.r_z, arm.shift)
    else:
        total = arm.sample_count(grid.size * grid.frames)
        if algorithm is Algorithm.RANDOM:
            pattern = uniform_random(grid, total, seed=arm.seed)
        elif algorithm is Algorithm.POISSON:
            pattern = poisson_disc(
                grid, r_min=arm.r_min, target=total, anisotropy=arm.anisotropy, seed=arm.seed
            )
        elif algorithm is Algorithm.MSE:
            if sens is None:
                raise KddValidationError("The MSE comparator needs a sensitivity model")
            pattern = greedy_mse(sens, design_config(arm, grid), lam=lam)
        elif algorithm is Algorithm.APPROX:
            keep = arm.sparse_keep if arm.sparse_keep is not None else w.values.size
            w_hat = threshold_w(w, keep)
            pattern = approx_best_candidate(w_hat, design_config(arm, grid), on_step=record)
            tracked_w = w_hat.to_dense()
        else:
            pattern = exact_best_candidate(w, design_config(arm, grid), on_step=record)
            tracked_w = w
    seconds = time.perf_counter() - start

    if tracked_w is not None:
        check_objective(tracked_w, pattern, tracked[0] if tracked else 0.0)
    objective = trace_moment2(w, dd_fft(pattern))
    _LOGGER.debug(
        "Arm %s (%s): %d samples, J=%.12g in %.3f s",
        arm.name,
        algorithm.value,
        pattern.total,
        objective,
        seconds,
    )
    return DesignOutcome(pattern=pattern, objective=objective, seconds=seconds)


def reference_image(sens: SensitivitySet) -> Image:
    """Phantom restricted to the model's support, one scaled copy per coefficient."""
    covered = np.sum(np.abs(sens.values) ** 2, axis=(0, 1, 2)) > 0
    phantom = synthetic_phantom(sens.spatial_dims) * covered
    scales = 1.0 / np.arange(1, sens.basis_size + 1)
    expand = (slice(None),) + (None,) * len(sens.spatial_dims)
    return Image(values=scales[expand] * phantom[None])


def reconstruction_mse(
    sens: SensitivitySet, pattern: SamplingPattern, recon: ReconSection
) -> float:
    """Relative squared error of a noise-free phantom reconstruction."""
    truth = reference_image(sens)
    data = apply_E(sens, pattern, truth)
    estimate = cg_solve(sens, pattern, data, recon.lam, tol=recon.tol, max_iter=recon.max_iter)
    return metrics(truth, estimate).rmse ** 2


def pattern_gfactor(
    sens: SensitivitySet,
    pattern: SamplingPattern,
    recon: ReconSection,
    *,
    workers: int | None = None,
) -> GFactorMap:
    """g-factor map of a pattern, analytic or pseudo-replica as configured."""
    if recon.analytic:
        return analytic_gfactor(sens, pattern, recon.lam)
    return pseudo_replica_gfactor(
        sens,
        pattern,
        recon.lam,
        replicas=recon.replicas,
        tol=recon.tol,
        max_iter=recon.max_iter,
        seed=recon.seed,
        workers=workers,
    )


def _relative(value: float, reference: float) -> float:
    return value / reference if reference != 0 else math.nan


def run_report(
    config: ExperimentConfig,
    out_dir: Path | str | None = None,
    *,
    workers: int | None = None,
) -> tuple[list[ReportRow], list[Path]]:
    """Design, reconstruct and score every arm of an experiment.

    Per arm the pattern is written as ``<name>.pattern.txt`` and, for 2-D
    images, the coefficient-averaged g map as ``<name>.gfactor.pgm``. The
    table ``report.csv`` normalizes MSE and J to the first uniform-lattice
    arm, which need not be listed first.

    Args:
        config: The experiment.
        out_dir: Output directory; ``config.output_dir`` when omitted.
        workers: Requested worker threads (capped by ``KDD_THREADS``).

    Returns:
        The table rows and every file written, the CSV last.

    Raises:
        KddValidationError: If the experiment has no uniform-lattice arm.
    """
    reference = next(
        (i for i, arm in enumerate(config.designs) if arm.algorithm is Algorithm.UNIFORM), None
    )
    if reference is None:
        raise KddValidationError("The report needs a uniform arm as its reference")
    target = Path(out_dir if out_dir is not None else config.output_dir)
    sens = build_sensitivity(config.model)
    w = model_weights(sens, workers=workers)
    written: list[Path] = []

    measured = []
    for arm in config.designs:
        outcome = run_design(arm, w, sens=sens)
        written.append(write_pattern(target / f"{arm.name}.pattern.txt", outcome.pattern))
        gmap = pattern_gfactor(sens, outcome.pattern, config.recon, workers=workers)
        combined = gmap.combined()
        if combined.ndim == 2:
            pgm = target / f"{arm.name}.gfactor.pgm"
            emit_map(combined, pgm)
            written.append(pgm)
        mse = reconstruction_mse(sens, outcome.pattern, config.recon)
        measured.append((arm, outcome, mse, gfactor_stats(gmap)))

    _, baseline, baseline_mse, _ = measured[reference]
    rows = [
        ReportRow(
            design=arm.name,
            algorithm=arm.algorithm.value,
            samples=outcome.pattern.total,
            acceleration=outcome.pattern.acceleration,
            objective=outcome.objective,
            objective_rel=_relative(outcome.objective, baseline.objective),
            mse=mse,
            mse_rel=_relative(mse, baseline_mse),
            max_g=stats.max,
            median_g=stats.median,
            design_seconds=outcome.seconds,
        )
        for arm, outcome, mse, stats in measured
    ]
    written.append(emit_csv([row.model_dump() for row in rows], target / "report.csv"))
    _LOGGER.info("Report for %d arms written to %s", len(rows), target)
    return rows, written
