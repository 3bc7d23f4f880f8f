"""Sensitivity-function models: supports, coil maps and temporal bases."""

from __future__ import annotations

from .builders import from_coils, from_coils_and_basis, from_support
from .models import CoilMaps, SensitivitySet, SupportMask, TemporalBasis
from .synthetic import (
    cross_support,
    ellipse_support,
    spline_basis,
    synthetic_coils,
    synthetic_phantom,
)

__all__ = [
    # Models
    "CoilMaps",
    "SensitivitySet",
    "SupportMask",
    "TemporalBasis",
    # Builders
    "from_coils",
    "from_coils_and_basis",
    "from_support",
    # Synthetic fixtures
    "cross_support",
    "ellipse_support",
    "spline_basis",
    "synthetic_coils",
    "synthetic_phantom",
]
