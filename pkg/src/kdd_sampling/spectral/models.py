"""Dense encoding model used as a brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
from numpy.typing import NDArray


class VarianceBound(NamedTuple):
    """Second spectral moment against its equal-eigenvalue lower bound."""

    moment2: float
    lower_bound: float
    gap: float


@dataclass(frozen=True, slots=True, eq=False)
class DenseModel:
    """Explicit encoding matrix E and its Gram matrix EᴴE.

    Rows are sampled (t, c, k) triples in that order, repeated by
    multiplicity; ``row_frames``, ``row_coils`` and ``row_locations`` (flat
    index on the full spatial grid) label them. Columns are (l, r) with r
    fastest.
    """

    encoding: NDArray[np.complex128]
    gram: NDArray[np.complex128]
    row_frames: NDArray[np.int64]
    row_coils: NDArray[np.int64]
    row_locations: NDArray[np.int64]

    @property
    def rows(self) -> int:
        """Number of rows Σ_t N_t·C (readout positions included)."""
        return int(self.encoding.shape[0])

    @property
    def columns(self) -> int:
        """Number of columns N·L."""
        return int(self.encoding.shape[1])

    def trace(self) -> float:
        """tr(EᴴE)."""
        return float(np.trace(self.gram).real)

    def frobenius2(self) -> float:
        """‖EᴴE‖²_F = tr((EᴴE)²)."""
        return float(np.sum(self.gram.real**2 + self.gram.imag**2))

    def eigenvalues(self, shift: float = 0.0) -> NDArray[np.float64]:
        """Ascending eigenvalues of EᴴE + shift·I."""
        shifted = self.gram + shift * np.eye(self.columns)
        return np.asarray(scipy.linalg.eigvalsh(shifted), dtype=np.float64)

    def is_hermitian_psd(self, tol: float = 1e-10) -> bool:
        """Check Hermitian symmetry and nonnegative spectrum relative to ``tol``."""
        scale = max(float(np.max(np.abs(self.gram))), 1.0)
        if not np.allclose(self.gram, self.gram.conj().T, rtol=0.0, atol=tol * scale):
            return False
        return bool(self.eigenvalues().min() >= -tol * scale)
