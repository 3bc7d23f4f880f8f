"""Tests for weighting-function computation and thresholding."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from kdd_sampling import KddDimensionError, KddValidationError
from kdd_sampling.grid import GridShape
from kdd_sampling.sensitivity import (
    SensitivitySet,
    from_coils,
    from_coils_and_basis,
    from_support,
    spline_basis,
    synthetic_coils,
)
from kdd_sampling.weighting import (
    SparseWeight,
    WeightFunction,
    collapse_readout,
    compute_w,
    compute_w_separable,
    threshold_w,
)


def _direct_w(sens: SensitivitySet) -> np.ndarray:
    """w straight from its definition, without the symmetrizing pass."""
    products = np.einsum("alc...,bld...->abcd...", sens.values, np.conj(sens.values))
    spectrum = np.fft.fftn(products, axes=tuple(range(4, products.ndim)))
    return (spectrum.real**2 + spectrum.imag**2).sum(axis=(2, 3)) / float(sens.voxels) ** 2


class TestComputeW:
    """Tests for compute_w."""

    def test_constant_map_is_impulse(self) -> None:
        """Test that a unit map over the full grid weights only Δk = 0."""
        w = compute_w(from_support(np.ones((4, 6), dtype=bool)))
        expected = np.zeros((1, 1, 4, 6))
        expected[0, 0, 0, 0] = 1.0
        np.testing.assert_allclose(w.values, expected, atol=1e-12)

    def test_nonnegative_and_symmetric(self, coil_weights: WeightFunction) -> None:
        """Test w ≥ 0 and w(Δk, t, t') = w(-Δk, t', t)."""
        values = coil_weights.values
        assert np.all(values >= 0)
        mirrored = np.roll(np.flip(values, axis=(2, 3)), 1, axis=(2, 3))
        np.testing.assert_array_equal(values, np.swapaxes(mirrored, 0, 1))

    def test_definition_is_symmetric_before_repair(self, dynamic_sens: SensitivitySet) -> None:
        """Test the pair symmetry of the defining sum itself, not of the repaired output."""
        raw = _direct_w(dynamic_sens)
        mirrored = np.swapaxes(np.roll(np.flip(raw, axis=2), 1, axis=2), 0, 1)
        np.testing.assert_allclose(raw, mirrored, rtol=0, atol=1e-12 * raw.max())
        np.testing.assert_allclose(
            compute_w(dynamic_sens).values, raw, rtol=0, atol=1e-12 * raw.max()
        )

    @pytest.mark.parametrize("shift", [(1, 0), (3, 5), (-2, 7)])
    def test_circular_shift_invariance(
        self, coil_sens: SensitivitySet, shift: tuple[int, int]
    ) -> None:
        """Test that rolling every map over the image grid leaves w unchanged."""
        rolled = SensitivitySet(values=np.roll(coil_sens.values, shift, axis=(3, 4)))
        expected = compute_w(coil_sens).values
        np.testing.assert_allclose(
            compute_w(rolled).values, expected, rtol=0, atol=1e-12 * expected.max()
        )

    def test_bandlimited_maps_give_bandlimited_w(self, rng: np.random.Generator) -> None:
        """Test that maps with frequencies in [-1, 1] leave w zero beyond |Δk| = 2."""
        size = 16
        r = np.arange(size)
        modes = np.exp(2j * np.pi * np.outer((-1, 0, 1), r) / size)
        mixing = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        sens = SensitivitySet(values=(mixing @ modes)[None, None])
        values = compute_w(sens).values[0, 0]
        outside = np.r_[3 : size - 2]
        assert np.all(values[outside] <= 1e-12 * values.max())
        assert np.all(values[[0, 1, 2, size - 2, size - 1]] > 1e-6 * values.max())

    @pytest.mark.parametrize("voxel", [(0, 0), (2, 5), (4, 1)])
    def test_single_voxel_support_is_flat(self, voxel: tuple[int, int]) -> None:
        """Test that a one-voxel support weights every offset by 1/N²."""
        mask = np.zeros((5, 6), dtype=bool)
        mask[voxel] = True
        w = compute_w(from_support(mask))
        np.testing.assert_allclose(w.values, np.full((1, 1, 5, 6), 1 / 30**2), rtol=1e-12)

    def test_grid(self, coil_weights: WeightFunction) -> None:
        """Test the phase-encode grid of the weights."""
        assert coil_weights.grid == GridShape(phase_dims=(8, 8))

    def test_workers_do_not_change_result(self, dynamic_sens: SensitivitySet) -> None:
        """Test bitwise independence from the worker count."""
        single = compute_w(dynamic_sens, workers=1)
        pooled = compute_w(dynamic_sens, workers=3)
        np.testing.assert_array_equal(single.values, pooled.values)

    def test_separable_matches_general(self) -> None:
        """Test the separable shortcut against the general formula."""
        coils = synthetic_coils((6, 4), 3, seed=7)
        basis = spline_basis(5, 2, order=1)
        general = compute_w(from_coils_and_basis(coils, basis)).values
        separable = compute_w_separable(coils, basis).values
        np.testing.assert_allclose(separable, general, rtol=1e-10, atol=1e-14)


class TestCollapseReadout:
    """Tests for collapse_readout."""

    def test_sums_readout(self) -> None:
        """Test that the readout offsets are summed and the length recorded."""
        coils = synthetic_coils((3, 4), 2, seed=1, readout_axis=0)
        w3d = compute_w(from_coils(coils))
        collapsed = collapse_readout(w3d)
        assert collapsed.readout_axis is None
        assert collapsed.readout_length == 3
        assert collapsed.grid == GridShape(phase_dims=(4,))
        np.testing.assert_allclose(collapsed.values, w3d.values.sum(axis=2))

    def test_requires_readout(self, coil_weights: WeightFunction) -> None:
        """Test that weights without a readout cannot be collapsed."""
        with pytest.raises(KddValidationError):
            collapse_readout(coil_weights)

    def test_uncollapsed_grid_is_rejected(self) -> None:
        """Test that design needs a collapsed readout."""
        coils = synthetic_coils((3, 4), 2, readout_axis=0)
        with pytest.raises(KddValidationError):
            _ = compute_w(from_coils(coils)).grid


class TestThreshold:
    """Tests for threshold_w and SparseWeight."""

    def test_keep_only_self_terms(self, dynamic_sens: SensitivitySet) -> None:
        """Test that keep = T retains exactly the (0, t, t) entries."""
        w = compute_w(dynamic_sens)
        w_hat = threshold_w(w, 4)
        assert w_hat.support_size == 4
        assert w_hat.frames_t.tolist() == w_hat.frames_tp.tolist() == [0, 1, 2, 3]
        assert not w_hat.offsets.any()

    def test_full_keep_round_trips(self, coil_weights: WeightFunction) -> None:
        """Test that keeping everything reproduces the dense weights."""
        dense = threshold_w(coil_weights, 1.0).to_dense()
        np.testing.assert_array_equal(dense.values, coil_weights.values)

    def test_keeps_largest(self, coil_weights: WeightFunction) -> None:
        """Test that retained entries dominate the discarded ones."""
        w_hat = threshold_w(coil_weights, 10)
        kept = w_hat.to_dense().values
        dropped = coil_weights.values[kept == 0]
        assert dropped.max() <= w_hat.values.min()

    def test_fraction(self, coil_weights: WeightFunction) -> None:
        """Test a fractional keep."""
        assert threshold_w(coil_weights, 0.25).support_size == 16

    def test_too_small(self, dynamic_sens: SensitivitySet) -> None:
        """Test that fewer than T entries are rejected."""
        with pytest.raises(KddValidationError):
            threshold_w(compute_w(dynamic_sens), 3)

    def test_bad_fraction(self, coil_weights: WeightFunction) -> None:
        """Test that fractions outside (0, 1] are rejected."""
        with pytest.raises(KddValidationError):
            threshold_w(coil_weights, 1.5)

    def test_clamped_keep_warns(
        self, coil_weights: WeightFunction, caplog: pytest.LogCaptureFixture
    ) -> None:
        """Test that an oversized keep is clamped with a warning."""
        with caplog.at_level(logging.WARNING):
            w_hat = threshold_w(coil_weights, 1000)
        assert w_hat.support_size == 64
        assert "keeping all" in caplog.text

    def test_sparse_shape_checks(self) -> None:
        """Test that offsets must match the grid."""
        with pytest.raises(KddDimensionError):
            SparseWeight(
                grid=GridShape(phase_dims=(4, 4)),
                offsets=np.zeros((1, 1), dtype=np.int64),
                frames_t=np.zeros(1, dtype=np.int64),
                frames_tp=np.zeros(1, dtype=np.int64),
                values=np.ones(1),
            )
