"""Weighting functions w(Δk, t, t') and their sparse surrogates."""

from __future__ import annotations

from .compute import collapse_readout, compute_w, compute_w_separable, threshold_w
from .models import SparseWeight, WeightFunction, negate_offsets, symmetrize

__all__ = [
    # Models
    "SparseWeight",
    "WeightFunction",
    # Computation
    "collapse_readout",
    "compute_w",
    "compute_w_separable",
    "threshold_w",
    # Helpers
    "negate_offsets",
    "symmetrize",
]
