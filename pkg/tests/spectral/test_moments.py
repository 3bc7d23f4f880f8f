"""Tests for the spectral moments and the dense oracle."""

from __future__ import annotations

import numpy as np
import pytest

from kdd_sampling import KddDimensionError, KddSizeLimitError
from kdd_sampling.design import uniform_pattern, uniform_random
from kdd_sampling.grid import GridShape, SamplingPattern, dd_fft
from kdd_sampling.sensitivity import (
    SensitivitySet,
    from_coils,
    from_support,
    synthetic_coils,
)
from kdd_sampling.spectral import build_dense, trace_moment1, trace_moment2, variance_bound
from kdd_sampling.weighting import WeightFunction, collapse_readout, compute_w


def _random_model(seed: int) -> tuple[SensitivitySet, SamplingPattern]:
    """Complex model with N ≤ 32, T ≤ 3, C ≤ 3, L ≤ 2 and a pattern with repeats."""
    rng = np.random.default_rng(seed)
    if rng.random() < 0.5:
        dims: tuple[int, ...] = (int(rng.integers(2, 33)),)
    else:
        ny = int(rng.integers(2, 7))
        dims = (ny, int(rng.integers(2, 32 // ny + 1)))
    frames = int(rng.integers(1, 4))
    basis = int(rng.integers(1, min(2, frames) + 1))
    coils = int(rng.integers(1, 4))
    shape = (frames, basis, coils, *dims)
    sens = SensitivitySet(values=rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    counts = rng.binomial(2, 0.4, size=sens.grid.count_shape)
    counts.flat[int(rng.integers(counts.size))] += 1
    return sens, SamplingPattern(grid=sens.grid, counts=counts)


class TestDenseModel:
    """Tests for build_dense."""

    def test_shapes(self, coil_sens: SensitivitySet, random_pattern: SamplingPattern) -> None:
        """Test rows Σ N_t·C and columns N·L."""
        model = build_dense(coil_sens, random_pattern)
        assert model.rows == 16 * 4
        assert model.columns == 64
        assert model.is_hermitian_psd()

    def test_full_sampling_of_normalized_coils_is_identity(self) -> None:
        """Test EᴴE = I for full sampling with unit sum-of-squares coils."""
        sens = from_coils(synthetic_coils((4, 4), 3, seed=2).normalized())
        model = build_dense(sens, SamplingPattern.full(sens.grid))
        np.testing.assert_allclose(model.gram, np.eye(16), atol=1e-12)

    def test_size_guard(self) -> None:
        """Test that oversized models are refused."""
        sens = from_support(np.ones((80, 80), dtype=bool))
        with pytest.raises(KddSizeLimitError) as info:
            build_dense(sens, SamplingPattern.empty(sens.grid))
        assert info.value.size == 6400


class TestTraceMoments:
    """Tests for trace_moment1 and trace_moment2."""

    def test_moment1_matches_dense(
        self, coil_sens: SensitivitySet, random_pattern: SamplingPattern
    ) -> None:
        """Test tr(EᴴE) against the dense trace."""
        dense = build_dense(coil_sens, random_pattern).trace()
        assert trace_moment1(coil_sens, random_pattern) == pytest.approx(dense, rel=1e-10)

    def test_moment1_ignores_positions(self, coil_sens: SensitivitySet) -> None:
        """Test that tr(EᴴE) depends on the counts only."""
        grid = coil_sens.grid
        first = trace_moment1(coil_sens, uniform_random(grid, 12, seed=1))
        second = trace_moment1(coil_sens, uniform_random(grid, 12, seed=2))
        assert first == pytest.approx(second, rel=1e-12)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_moment2_matches_dense(
        self, coil_sens: SensitivitySet, coil_weights: WeightFunction, seed: int
    ) -> None:
        """Test ⟨w, p⟩ = ‖EᴴE‖²_F for a parallel-imaging model."""
        pattern = uniform_random(coil_sens.grid, 20, seed=seed)
        dense = build_dense(coil_sens, pattern).frobenius2()
        assert trace_moment2(coil_weights, dd_fft(pattern)) == pytest.approx(dense, rel=1e-9)

    def test_moment2_dynamic(self, dynamic_sens: SensitivitySet) -> None:
        """Test ⟨w, p⟩ for a temporal-basis model with repeats."""
        pattern = uniform_random(dynamic_sens.grid, 10, seed=3, replace=True)
        w = compute_w(dynamic_sens)
        dense = build_dense(dynamic_sens, pattern).frobenius2()
        assert trace_moment2(w, dd_fft(pattern)) == pytest.approx(dense, rel=1e-9)

    def test_moment2_readout(self) -> None:
        """Test that the collapsed readout reproduces the full moment."""
        sens = from_coils(synthetic_coils((4, 6), 2, seed=5, readout_axis=0))
        w = collapse_readout(compute_w(sens))
        pattern = uniform_random(sens.grid, 3, seed=4)
        dense = build_dense(sens, pattern).frobenius2()
        assert trace_moment2(w, dd_fft(pattern)) == pytest.approx(dense, rel=1e-9)

    def test_moment2_shape_mismatch(self, coil_weights: WeightFunction) -> None:
        """Test that a distribution on another grid is rejected."""
        pattern = SamplingPattern.empty(GridShape(phase_dims=(4, 4)))
        with pytest.raises(KddDimensionError):
            trace_moment2(coil_weights, dd_fft(pattern))


class TestRandomModels:
    """Moment identities on random complex models."""

    @pytest.mark.parametrize("seed", range(20))
    def test_moments_match_dense(self, seed: int) -> None:
        """Test tr(EᴴE) and ⟨w, p⟩ against the dense normal operator."""
        sens, pattern = _random_model(seed)
        model = build_dense(sens, pattern)
        assert trace_moment1(sens, pattern) == pytest.approx(model.trace(), rel=1e-9)
        moment2 = trace_moment2(compute_w(sens), dd_fft(pattern))
        assert moment2 == pytest.approx(model.frobenius2(), rel=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_moment2_is_translation_invariant(self, seed: int) -> None:
        """Test that shifting the whole pattern leaves tr((EᴴE)²) unchanged."""
        sens, pattern = _random_model(seed)
        w = compute_w(sens)
        axes = tuple(range(1, 1 + sens.grid.ndim))
        shift = tuple(n // 2 + 1 for n in sens.grid.phase_dims)
        moved = SamplingPattern(grid=pattern.grid, counts=np.roll(pattern.counts, shift, axes))
        before = trace_moment2(w, dd_fft(pattern))
        assert trace_moment2(w, dd_fft(moved)) == pytest.approx(before, rel=1e-12)
        assert build_dense(sens, moved).frobenius2() == pytest.approx(before, rel=1e-9)

    @pytest.mark.parametrize("shift", [1e-3, 0.5, 10.0])
    def test_tikhonov_shift_keeps_eigenvalue_variance(
        self, coil_sens: SensitivitySet, random_pattern: SamplingPattern, shift: float
    ) -> None:
        """Test that EᴴE + λI spreads its eigenvalues exactly like EᴴE."""
        model = build_dense(coil_sens, random_pattern)
        plain = model.eigenvalues()
        shifted = model.eigenvalues(shift)
        np.testing.assert_allclose(shifted, plain + shift, atol=1e-9 * plain.max())
        assert np.var(shifted) == pytest.approx(np.var(plain), rel=1e-9)


class TestVarianceBound:
    """Tests for variance_bound."""

    def test_bound_holds(self, coil_sens: SensitivitySet, random_pattern: SamplingPattern) -> None:
        """Test tr((EᴴE)²) ≥ (tr EᴴE)² / dim."""
        bound = variance_bound(coil_sens, random_pattern)
        assert bound.gap >= -1e-9 * bound.moment2

    def test_full_support_sampling_is_tight(self) -> None:
        """Test that full sampling of a support model attains the bound."""
        mask = np.zeros((6, 6), dtype=bool)
        mask[1:4, 2:5] = True
        sens = from_support(mask)
        bound = variance_bound(sens, SamplingPattern.full(sens.grid))
        assert bound.gap == pytest.approx(0.0, abs=1e-9)
        assert bound.moment2 == pytest.approx(9.0)

    def test_uniform_aliasing_disjoint_support_is_tight(self) -> None:
        """Test R = 2 uniform sampling of a support that does not alias onto itself."""
        mask = np.zeros((8,), dtype=bool)
        mask[:4] = True
        sens = from_support(mask)
        pattern = uniform_pattern(sens.grid, 2)
        bound = variance_bound(sens, pattern)
        assert bound.gap == pytest.approx(0.0, abs=1e-9)
