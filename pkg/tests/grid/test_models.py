"""Tests for grid and pattern models."""

from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from kdd_sampling import KddDimensionError, KddValidationError
from kdd_sampling.grid import DifferentialDistribution, GridShape, SamplingPattern


class TestGridShape:
    """Tests for GridShape."""

    def test_sizes(self) -> None:
        """Test derived sizes and shapes."""
        grid = GridShape(phase_dims=(4, 6), frames=3)
        assert grid.size == 24
        assert grid.ndim == 2
        assert grid.count_shape == (3, 4, 6)
        assert grid.pair_shape == (3, 3, 4, 6)

    def test_wrap_is_periodic(self) -> None:
        """Test that indices are reduced modulo each dimension."""
        grid = GridShape(phase_dims=(4, 6))
        assert grid.wrap((-1, 7)) == (3, 1)
        assert GridShape(phase_dims=(5,)).wrap(12) == (2,)

    def test_ravel_round_trip(self) -> None:
        """Test that ravel and unravel are inverse."""
        grid = GridShape(phase_dims=(4, 6))
        assert grid.ravel((2, 3)) == 15
        assert grid.unravel(15) == (2, 3)

    def test_wrong_index_length(self) -> None:
        """Test that a mismatched index raises a dimension error."""
        grid = GridShape(phase_dims=(4, 6))
        with pytest.raises(KddDimensionError):
            grid.wrap((1,))

    @pytest.mark.parametrize("dims", [(), (2, 2, 2), (0, 4)])
    def test_invalid_dims(self, dims: tuple[int, ...]) -> None:
        """Test that unsupported grids are rejected."""
        with pytest.raises(ValidationError):
            GridShape(phase_dims=dims)

    def test_frozen(self) -> None:
        """Test that the grid is immutable."""
        grid = GridShape(phase_dims=(4,))
        with pytest.raises(ValidationError):
            grid.frames = 2  # type: ignore[misc]


class TestSamplingPattern:
    """Tests for SamplingPattern."""

    def test_empty_and_full(self) -> None:
        """Test the empty and fully sampled constructors."""
        grid = GridShape(phase_dims=(4,), frames=2)
        assert SamplingPattern.empty(grid).total == 0
        full = SamplingPattern.full(grid)
        assert full.total == 8
        assert full.acceleration == 1.0

    def test_from_samples_counts_repeats(self) -> None:
        """Test that repeated samples carry multiplicity."""
        grid = GridShape(phase_dims=(4, 4))
        pattern = SamplingPattern.from_samples(grid, [((1, 2), 0), ((1, 2), 0), ((5, 0), 0)])
        assert pattern.count((1, 2), 0) == 2
        assert pattern.count((1, 0), 0) == 1
        assert pattern.total == 3

    def test_acceleration(self) -> None:
        """Test R = N·T / Σ N_t."""
        grid = GridShape(phase_dims=(8,), frames=2)
        pattern = SamplingPattern.from_samples(grid, [(0, 0), (4, 1)])
        assert pattern.acceleration == 8.0
        assert list(pattern.totals) == [1, 1]

    def test_empty_acceleration_is_infinite(self) -> None:
        """Test that an empty pattern has infinite acceleration."""
        assert SamplingPattern.empty(GridShape(phase_dims=(4,))).acceleration == float("inf")

    def test_remove(self) -> None:
        """Test removing samples and removing an absent one."""
        grid = GridShape(phase_dims=(4,))
        pattern = SamplingPattern.from_samples(grid, [(1, 0)])
        pattern.remove(1, 0)
        assert pattern.total == 0
        with pytest.raises(KddValidationError):
            pattern.remove(1, 0)

    def test_frame_out_of_range(self) -> None:
        """Test that an invalid frame is rejected."""
        pattern = SamplingPattern.empty(GridShape(phase_dims=(4,), frames=2))
        with pytest.raises(KddValidationError):
            pattern.add(0, 2)

    def test_samples_sorted_by_k_then_t(self) -> None:
        """Test the lexicographic (k, t) sample order."""
        grid = GridShape(phase_dims=(4,), frames=2)
        pattern = SamplingPattern.from_samples(grid, [(3, 0), (1, 1), (1, 0), (1, 0)])
        assert pattern.samples() == [((1,), 0), ((1,), 0), ((1,), 1), ((3,), 0)]

    def test_shape_mismatch(self) -> None:
        """Test that counts must match the grid."""
        with pytest.raises(KddDimensionError):
            SamplingPattern(grid=GridShape(phase_dims=(4,)), counts=np.zeros((1, 5)))

    def test_negative_counts(self) -> None:
        """Test that negative counts are rejected."""
        with pytest.raises(KddValidationError):
            SamplingPattern(grid=GridShape(phase_dims=(2,)), counts=np.array([[1, -1]]))

    def test_equality_and_copy(self) -> None:
        """Test value equality and copy independence."""
        grid = GridShape(phase_dims=(4,))
        pattern = SamplingPattern.from_samples(grid, [(2, 0)])
        clone = pattern.copy()
        assert clone == pattern
        clone.add(0, 0)
        assert clone != pattern


class TestDifferentialDistribution:
    """Tests for DifferentialDistribution."""

    def test_shape_must_match(self) -> None:
        """Test that values must have the pair shape."""
        grid = GridShape(phase_dims=(4,), frames=2)
        with pytest.raises(KddDimensionError):
            DifferentialDistribution(grid=grid, values=np.zeros((2, 4)))

    def test_masses(self) -> None:
        """Test the per-pair mass accessor."""
        grid = GridShape(phase_dims=(2,))
        p = DifferentialDistribution(grid=grid, values=np.array([[[2, 1]]]))
        assert p.masses().tolist() == [[3]]
