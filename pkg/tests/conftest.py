"""Pytest configuration and fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from kdd_sampling.design import uniform_random
from kdd_sampling.grid import GridShape, SamplingPattern
from kdd_sampling.sensitivity import (
    SensitivitySet,
    from_coils,
    from_coils_and_basis,
    spline_basis,
    synthetic_coils,
)
from kdd_sampling.weighting import WeightFunction, compute_w


@pytest.fixture
def grid_2d() -> GridShape:
    """Return a small single-frame 2-D grid."""
    return GridShape(phase_dims=(8, 8))


@pytest.fixture
def dynamic_grid() -> GridShape:
    """Return a 1-D grid with several frames."""
    return GridShape(phase_dims=(6,), frames=4)


@pytest.fixture
def coil_sens() -> SensitivitySet:
    """Return a 4-coil parallel-imaging model on an 8×8 grid."""
    return from_coils(synthetic_coils((8, 8), 4, seed=1))


@pytest.fixture
def coil_weights(coil_sens: SensitivitySet) -> WeightFunction:
    """Return the weighting function of the 4-coil model."""
    return compute_w(coil_sens)


@pytest.fixture
def dynamic_sens() -> SensitivitySet:
    """Return a 2-coil, 4-frame temporal-basis model on a 1-D grid of 6."""
    coils = synthetic_coils((6,), 2, seed=3)
    return from_coils_and_basis(coils, spline_basis(4, 2, order=1))


@pytest.fixture
def random_pattern(grid_2d: GridShape) -> SamplingPattern:
    """Return a random 16-sample pattern on the 8×8 grid."""
    return uniform_random(grid_2d, 16, seed=5)


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded random generator."""
    return np.random.default_rng(1234)
