"""kdd-sampling - k-space sampling design from differential distributions.

This library designs and evaluates Cartesian k-space sampling patterns for
parallel and dynamic MRI by minimizing the second spectral moment of the
information matrix, tr((EᴴE)²) = ⟨w, p⟩, where p is the differential
distribution of the pattern and w a weighting function computed from the
sensitivity model.

Example:
    ```python
    from kdd_sampling.design import DesignConfig, exact_best_candidate
    from kdd_sampling.sensitivity import from_coils, synthetic_coils
    from kdd_sampling.weighting import compute_w

    sens = from_coils(synthetic_coils((32, 32), coils=8))
    w = compute_w(sens)
    pattern = exact_best_candidate(w, DesignConfig(total=256))
    ```
"""

from __future__ import annotations

from ._version import __version__
from .config import ExperimentConfig, load_config
from .const import Algorithm, CoilProfile, ModelKind, SupportProfile, TieBreak
from .exceptions import (
    KddConfigError,
    KddConsistencyError,
    KddConvergenceError,
    KddDimensionError,
    KddError,
    KddFormatError,
    KddSizeLimitError,
    KddValidationError,
)
from .grid import DifferentialDistribution, GridShape, SamplingPattern
from .sensitivity import SensitivitySet
from .weighting import SparseWeight, WeightFunction

__all__ = [
    # Version
    "__version__",
    # Configuration
    "ExperimentConfig",
    "load_config",
    # Enums
    "Algorithm",
    "CoilProfile",
    "ModelKind",
    "SupportProfile",
    "TieBreak",
    # Core types
    "DifferentialDistribution",
    "GridShape",
    "SamplingPattern",
    "SensitivitySet",
    "SparseWeight",
    "WeightFunction",
    # Exceptions
    "KddConfigError",
    "KddConsistencyError",
    "KddConvergenceError",
    "KddDimensionError",
    "KddError",
    "KddFormatError",
    "KddSizeLimitError",
    "KddValidationError",
]
