"""Sampling-pattern design: best-candidate greedy, baselines, periodic cells and MSE greedy."""

from __future__ import annotations

from .baselines import poisson_disc, uniform_pattern, uniform_random
from .greedy import (
    approx_best_candidate,
    delta_j_from_pattern,
    delta_j_init,
    exact_best_candidate,
    insert_sample,
    remove_sample,
)
from .models import DeltaJMap, DesignConfig, PeriodicCell, PeriodicScore
from .mse import default_lambda, greedy_mse, mse_objective
from .periodic import caipi_enumerate, evaluate_periodic, periodic_dd
from .queue import CandidateQueue

__all__ = [
    # Models
    "DeltaJMap",
    "DesignConfig",
    "PeriodicCell",
    "PeriodicScore",
    "CandidateQueue",
    # Best-candidate greedy
    "approx_best_candidate",
    "delta_j_from_pattern",
    "delta_j_init",
    "exact_best_candidate",
    "insert_sample",
    "remove_sample",
    # Baselines
    "poisson_disc",
    "uniform_pattern",
    "uniform_random",
    # Periodic patterns
    "caipi_enumerate",
    "evaluate_periodic",
    "periodic_dd",
    # MSE comparator
    "default_lambda",
    "greedy_mse",
    "mse_objective",
]
