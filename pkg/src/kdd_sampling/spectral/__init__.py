"""Spectral moments of the information matrix and the dense oracle."""

from __future__ import annotations

from .models import DenseModel, VarianceBound
from .moments import build_dense, trace_moment1, trace_moment2, variance_bound

__all__ = [
    # Models
    "DenseModel",
    "VarianceBound",
    # Moments
    "build_dense",
    "trace_moment1",
    "trace_moment2",
    "variance_bound",
]
