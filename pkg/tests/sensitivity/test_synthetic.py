"""Tests for the synthetic fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from kdd_sampling import KddValidationError
from kdd_sampling.const import CoilProfile
from kdd_sampling.sensitivity import (
    cross_support,
    ellipse_support,
    spline_basis,
    synthetic_coils,
    synthetic_phantom,
)


class TestSyntheticCoils:
    """Tests for synthetic_coils."""

    def test_shape_and_determinism(self) -> None:
        """Test that maps are reproducible for a seed."""
        first = synthetic_coils((8, 6), 4, seed=3)
        second = synthetic_coils((8, 6), 4, seed=3)
        assert first.values.shape == (4, 8, 6)
        np.testing.assert_array_equal(first.values, second.values)

    def test_seed_changes_phase(self) -> None:
        """Test that another seed gives other maps."""
        first = synthetic_coils((8, 6), 4, seed=3)
        second = synthetic_coils((8, 6), 4, seed=4)
        assert not np.allclose(first.values, second.values)

    def test_single_coil_is_constant(self) -> None:
        """Test the single-coil degenerate case."""
        coils = synthetic_coils((5,), 1)
        np.testing.assert_array_equal(coils.values, np.ones((1, 5)))

    def test_birdcage_is_normalized(self) -> None:
        """Test that birdcage maps have unit sum of squares."""
        coils = synthetic_coils((8, 8), 6, CoilProfile.BIRDCAGE)
        np.testing.assert_allclose(coils.sum_of_squares(), 1.0)

    def test_invalid_coil_count(self) -> None:
        """Test that zero coils are rejected."""
        with pytest.raises(KddValidationError):
            synthetic_coils((4,), 0)


class TestSplineBasis:
    """Tests for spline_basis."""

    def test_peaks_are_one(self) -> None:
        """Test the column scaling."""
        basis = spline_basis(12, 4)
        assert basis.values.shape == (12, 4)
        np.testing.assert_allclose(basis.values.max(axis=0), 1.0)

    def test_periodic_columns_are_shifts(self) -> None:
        """Test that equally spaced periodic splines are circular shifts."""
        basis = spline_basis(12, 4).values
        for column in range(1, 4):
            np.testing.assert_allclose(basis[:, column], np.roll(basis[:, 0], 3 * column))

    @pytest.mark.parametrize(("frames", "size"), [(4, 5), (4, 0)])
    def test_invalid_size(self, frames: int, size: int) -> None:
        """Test that L must lie in 1..T."""
        with pytest.raises(KddValidationError):
            spline_basis(frames, size)


class TestSupports:
    """Tests for the synthetic supports and the phantom."""

    def test_cross_tiles_under_quincunx_shift(self) -> None:
        """Test that the half-period diagonal translate is the complement."""
        mask = cross_support((16, 12), seed=2).values
        shifted = np.roll(mask, (8, 6), axis=(0, 1))
        assert np.all(mask ^ shifted)
        assert mask.sum() == 16 * 12 // 2

    def test_cross_needs_even_grid(self) -> None:
        """Test that odd grids are rejected."""
        with pytest.raises(KddValidationError):
            cross_support((15, 12))

    def test_ellipse(self) -> None:
        """Test that the ellipse covers the centre but not the corners."""
        mask = ellipse_support((32, 32)).values
        assert mask[16, 16]
        assert not mask[0, 0]
        assert not mask[31, 31]

    def test_phantom(self) -> None:
        """Test the phantom shape and that it vanishes at the border."""
        image = synthetic_phantom((16, 16))
        assert image.shape == (16, 16)
        assert abs(image[0, 0]) < 1e-12
        assert abs(image[8, 8]) > 0.5
