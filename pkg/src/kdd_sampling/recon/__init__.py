"""Encoding operators, CG reconstruction, g-factor maps and image metrics."""

from __future__ import annotations

from .gfactor import analytic_gfactor, pseudo_replica_gfactor
from .metrics import gfactor_stats, metrics
from .models import GFactorMap, GFactorStats, Image, KSpaceData, ReconMetrics
from .operators import apply_E, apply_EH, gram_apply, white_noise
from .solver import cg_solve

__all__ = [
    # Models
    "GFactorMap",
    "GFactorStats",
    "Image",
    "KSpaceData",
    "ReconMetrics",
    # Operators
    "apply_E",
    "apply_EH",
    "gram_apply",
    "white_noise",
    # Solver
    "cg_solve",
    # g-factor
    "analytic_gfactor",
    "pseudo_replica_gfactor",
    # Metrics
    "gfactor_stats",
    "metrics",
]
