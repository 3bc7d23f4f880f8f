"""Matrix-free encoding operator E = D·F·S and its adjoint."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ..exceptions import KddDimensionError
from ..grid import SamplingPattern
from ..sensitivity import SensitivitySet
from .models import Image, KSpaceData


def _check_image(sens: SensitivitySet, image: Image) -> None:
    expected = (sens.basis_size, *sens.spatial_dims)
    if image.values.shape != expected:
        raise KddDimensionError(
            f"Image of shape {image.values.shape} does not match the model {expected}",
            expected=expected,
            actual=image.values.shape,
        )


def sampled_rows(sens: SensitivitySet, pattern: SamplingPattern) -> list[NDArray[np.int64]]:
    """Flat full-grid index of every sampled row, per frame, repeats included."""
    counts = sens.expand_counts(pattern)
    rows = []
    for t in range(sens.frames):
        flat = counts[t].ravel()
        sampled = np.flatnonzero(flat)
        rows.append(np.repeat(sampled, flat[sampled]).astype(np.int64))
    return rows


def coil_images(sens: SensitivitySet, image: Image) -> NDArray[np.complex128]:
    """Σ_l S_{t,l,c}·m_l, shape ``(T, C, *spatial_dims)``."""
    _check_image(sens, image)
    return np.einsum("tlc...,l...->tc...", sens.values, image.values)


def apply_E(  # noqa: N802
    sens: SensitivitySet, pattern: SamplingPattern, image: Image
) -> KSpaceData:
    """Apply the encoding operator with a unitary DFT.

    Raises:
        KddDimensionError: If the image or pattern does not match the model.
    """
    axes = tuple(range(2, 2 + len(sens.spatial_dims)))
    spectra = np.fft.fftn(coil_images(sens, image), axes=axes, norm="ortho")
    flat = spectra.reshape(sens.frames, sens.coils, -1)
    parts = [flat[t][:, rows].ravel() for t, rows in enumerate(sampled_rows(sens, pattern))]
    return KSpaceData(
        pattern=pattern,
        coils=sens.coils,
        readout_length=sens.readout_length,
        values=np.concatenate(parts) if parts else np.zeros(0, dtype=np.complex128),
    )


def apply_EH(  # noqa: N802
    sens: SensitivitySet, pattern: SamplingPattern, data: KSpaceData
) -> Image:
    """Apply the adjoint operator Eᴴ.

    Raises:
        KddDimensionError: If the data does not belong to ``pattern`` and the model.
    """
    if data.pattern != pattern or data.coils != sens.coils:
        raise KddDimensionError("k-space data was not acquired with this pattern and model")
    voxels = sens.voxels
    spectra = np.zeros((sens.frames, sens.coils, voxels), dtype=np.complex128)
    offset = 0
    for t, rows in enumerate(sampled_rows(sens, pattern)):
        block = data.values[offset : offset + rows.size * sens.coils]
        offset += block.size
        for c, chunk in enumerate(block.reshape(sens.coils, rows.size)):
            np.add.at(spectra[t, c], rows, chunk)

    axes = tuple(range(2, 2 + len(sens.spatial_dims)))
    images = np.fft.ifftn(
        spectra.reshape(sens.frames, sens.coils, *sens.spatial_dims), axes=axes, norm="ortho"
    )
    return Image(values=np.einsum("tlc...,tc...->l...", np.conj(sens.values), images))


def gram_apply(sens: SensitivitySet, pattern: SamplingPattern, image: Image) -> Image:
    """EᴴE·m evaluated as Sᴴ·F⁻¹·(counts ⊙ F·S·m).

    Repeated samples weight their location by the multiplicity.
    """
    axes = tuple(range(2, 2 + len(sens.spatial_dims)))
    counts = sens.expand_counts(pattern)[:, None].astype(np.float64)
    spectra = np.fft.fftn(coil_images(sens, image), axes=axes, norm="ortho") * counts
    images = np.fft.ifftn(spectra, axes=axes, norm="ortho")
    return Image(values=np.einsum("tlc...,tc...->l...", np.conj(sens.values), images))


def white_noise(
    sens: SensitivitySet, pattern: SamplingPattern, rng: np.random.Generator
) -> KSpaceData:
    """Unit-variance circular complex Gaussian noise on every sampled row."""
    rows = pattern.total * sens.readout_length * sens.coils
    noise = (rng.standard_normal(rows) + 1j * rng.standard_normal(rows)) / np.sqrt(2.0)
    return KSpaceData(
        pattern=pattern, coils=sens.coils, readout_length=sens.readout_length, values=noise
    )
