"""Image-error and g-factor summary metrics."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ..exceptions import KddDimensionError, KddValidationError
from .models import GFactorMap, GFactorStats, Image, ReconMetrics


def gfactor_stats(gmap: GFactorMap | NDArray[np.float64]) -> GFactorStats:
    """Max, median, mean, rms and 95th percentile of g over its nonzero region.

    A :class:`GFactorMap` is reduced to its coefficient-averaged map first.

    Raises:
        KddValidationError: If the map has no nonzero entry.
    """
    values = gmap.combined() if isinstance(gmap, GFactorMap) else np.asarray(gmap, dtype=float)
    region = values[values > 0]
    if region.size == 0:
        raise KddValidationError("g-factor map has no nonzero region")
    return GFactorStats(
        max=float(region.max()),
        median=float(np.median(region)),
        mean=float(region.mean()),
        rms=float(np.sqrt(np.mean(region**2))),
        p95=float(np.percentile(region, 95)),
    )


def metrics(reference: Image, test: Image, gmap: GFactorMap | None = None) -> ReconMetrics:
    """Normalized RMSE ‖test - reference‖ / ‖reference‖ and optional g statistics.

    Raises:
        KddDimensionError: If the images differ in shape.
        KddValidationError: If the reference is zero.
    """
    if reference.values.shape != test.values.shape:
        raise KddDimensionError(
            "Images differ in shape",
            expected=reference.values.shape,
            actual=test.values.shape,
        )
    energy = reference.norm()
    if energy == 0:
        raise KddValidationError("Reference image is zero")
    rmse = float(np.linalg.norm(test.values - reference.values)) / energy
    if gmap is None:
        return ReconMetrics(rmse=rmse)
    stats = gfactor_stats(gmap)
    return ReconMetrics(
        rmse=rmse,
        max_g=stats.max,
        median_g=stats.median,
        mean_g=stats.mean,
        rms_g=stats.rms,
        p95_g=stats.p95,
    )
