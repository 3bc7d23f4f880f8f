"""Reproducing-kernel analysis: kernel tables, power functions and rank correlation."""

from __future__ import annotations

from .analysis import kernel, power_function, spearman, w_from_kernel
from .models import KernelMatrix, PowerFunction

__all__ = [
    # Models
    "KernelMatrix",
    "PowerFunction",
    # Analysis
    "kernel",
    "power_function",
    "spearman",
    "w_from_kernel",
]
