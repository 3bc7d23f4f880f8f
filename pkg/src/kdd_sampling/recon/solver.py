"""Conjugate-gradient Tikhonov least squares."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from ..const import (
    CG_DIVERGENCE_FACTOR,
    CG_DIVERGENCE_WINDOW,
    DEFAULT_CG_MAX_ITER,
    DEFAULT_CG_TOL,
    DEFAULT_LAMBDA,
)
from ..exceptions import KddValidationError
from ..grid import SamplingPattern
from ..sensitivity import SensitivitySet
from .models import Image, KSpaceData
from .operators import apply_EH, gram_apply

_LOGGER = logging.getLogger(__name__)

IterationCallback = Callable[[int, float], None]


def cg_solve(
    sens: SensitivitySet,
    pattern: SamplingPattern,
    data: KSpaceData,
    lam: float = DEFAULT_LAMBDA,
    *,
    tol: float = DEFAULT_CG_TOL,
    max_iter: int = DEFAULT_CG_MAX_ITER,
    on_iteration: IterationCallback | None = None,
) -> Image:
    """Solve (EᴴE + λI)m = Eᴴy by conjugate gradients from m = 0.

    Iteration stops once δ = ‖m⁽ᵏ⁺¹⁾ - m⁽ᵏ⁾‖ / ‖m⁽ᵏ⁾‖ drops below ``tol``
    or the residual vanishes, and never runs past ``max_iter``. A δ that grows by
    ``CG_DIVERGENCE_FACTOR`` over ``CG_DIVERGENCE_WINDOW`` iterations is
    logged as a warning.

    Args:
        sens: Sensitivity model.
        pattern: Sampling pattern of ``data``.
        data: Sampled k-space.
        lam: Tikhonov weight λ ≥ 0.
        tol: Threshold on δ.
        max_iter: Iteration limit.
        on_iteration: Called with the iteration number and δ (``inf`` when
            undefined).

    Returns:
        The regularized solution.

    Raises:
        KddValidationError: If ``lam`` is negative or ``max_iter`` is not positive.
    """
    if lam < 0:
        raise KddValidationError(f"λ must be nonnegative, got {lam}")
    if max_iter < 1:
        raise KddValidationError(f"max_iter must be positive, got {max_iter}")

    rhs = apply_EH(sens, pattern, data).values
    x = np.zeros_like(rhs)
    residual = rhs.copy()
    direction = residual.copy()
    rr = float(np.vdot(residual, residual).real)
    history: list[float] = []
    warned = False

    iteration = 0
    for iteration in range(1, max_iter + 1):
        if rr == 0.0:
            break
        product = gram_apply(sens, pattern, Image(values=direction)).values + lam * direction
        curvature = float(np.vdot(direction, product).real)
        if curvature == 0.0:
            break
        alpha = rr / curvature
        step = alpha * direction
        previous = float(np.linalg.norm(x))
        x = x + step
        residual = residual - alpha * product
        rr_next = float(np.vdot(residual, residual).real)
        direction = residual + (rr_next / rr) * direction
        rr = rr_next

        delta = float(np.linalg.norm(step)) / previous if previous > 0 else float("inf")
        history.append(delta)
        if on_iteration is not None:
            on_iteration(iteration, delta)
        if (
            not warned
            and len(history) > CG_DIVERGENCE_WINDOW
            and history[-1] > CG_DIVERGENCE_FACTOR * history[-1 - CG_DIVERGENCE_WINDOW]
        ):
            _LOGGER.warning(
                "CG step size grew from %.3g to %.3g over %d iterations",
                history[-1 - CG_DIVERGENCE_WINDOW],
                history[-1],
                CG_DIVERGENCE_WINDOW,
            )
            warned = True
        if delta < tol:
            break

    _LOGGER.debug("CG stopped after %d iteration(s), |r|^2=%.3g", iteration, rr)
    return Image(values=x)
