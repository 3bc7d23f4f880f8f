"""Periodic Cartesian grids, sampling patterns, PSFs and differential distributions."""

from __future__ import annotations

from .models import (
    DifferentialDistribution,
    GridShape,
    PointSpreadFunction,
    SamplingPattern,
)
from .transforms import dd_direct, dd_fft, dd_from_psf, psf

__all__ = [
    # Models
    "DifferentialDistribution",
    "GridShape",
    "PointSpreadFunction",
    "SamplingPattern",
    # Transforms
    "dd_direct",
    "dd_fft",
    "dd_from_psf",
    "psf",
]
