"""Constants for the kdd-sampling library."""

from __future__ import annotations

from enum import Enum
from typing import Final

from ._version import __version__


class TieBreak(str, Enum):
    """Rule used when several candidates share the minimal insertion cost.

    LEXICOGRAPHIC: smallest (k, t), with k in row-major order.
    RANDOM: a seeded random permutation of the candidates decides.
    """

    LEXICOGRAPHIC = "lexicographic"
    RANDOM = "random"


class CoilProfile(str, Enum):
    """Synthetic coil sensitivity profiles."""

    GAUSSIAN = "gaussian"
    BIRDCAGE = "birdcage"


class SupportProfile(str, Enum):
    """Synthetic object supports."""

    FULL = "full"
    CROSS = "cross"
    ELLIPSE = "ellipse"


class ModelKind(str, Enum):
    """Source of the sensitivity functions in an experiment."""

    SUPPORT = "support"
    COILS = "coils"
    COILS_BASIS = "coils+basis"


class Algorithm(str, Enum):
    """Pattern generators available to experiments and the CLI."""

    EXACT = "exact"
    APPROX = "approx"
    MSE = "mse"
    POISSON = "poisson"
    UNIFORM = "uniform"
    RANDOM = "random"


# File format tags
PATTERN_FORMAT_TAG: Final[str] = "kdd-pattern v1"
SPARSE_WEIGHT_FORMAT_TAG: Final[str] = "kdd-sparse-weight v1"
ARRAY_FORMAT_TAG: Final[str] = "kdd-array v1"
MANIFEST_FORMAT_TAG: Final[str] = "kdd-manifest v1"

# Array container
ARRAY_HEADER_SUFFIX: Final[str] = ".json"
ARRAY_PAYLOAD_SUFFIX: Final[str] = ".raw"
ARRAY_DTYPES: Final[tuple[str, ...]] = ("complex64", "complex128", "float32", "float64", "int64")
READOUT_LABEL: Final[str] = "readout"

# Desk-scale guards
DENSE_MAX_COLUMNS: Final[int] = 4096
MSE_MAX_COLUMNS: Final[int] = 2048
KERNEL_MAX_ENTRIES: Final[int] = 1 << 24

# Reconstruction defaults
DEFAULT_REPLICAS: Final[int] = 100
DEFAULT_CG_TOL: Final[float] = 1e-6
DEFAULT_CG_MAX_ITER: Final[int] = 200
DEFAULT_LAMBDA: Final[float] = 1e-4
CG_DIVERGENCE_WINDOW: Final[int] = 10
CG_DIVERGENCE_FACTOR: Final[float] = 10.0

# Design defaults
MSE_LAMBDA_FACTOR: Final[float] = 1e-4
MSE_TIE_RTOL: Final[float] = 1e-9
POISSON_MAX_ATTEMPTS: Final[int] = 30
POISSON_SHRINK: Final[float] = 0.95
CAIPI_OUTLIER_FACTOR: Final[float] = 10.0

# Validation tolerances
BASIS_RANK_TOL: Final[float] = 1e-10
KERNEL_RIDGE: Final[float] = 1e-10
KERNEL_WARN_CONDITION: Final[float] = 1e12
RANK_SPREAD_RTOL: Final[float] = 1e-12
WEIGHT_SYMMETRY_RTOL: Final[float] = 1e-9

# Environment
THREADS_ENV: Final[str] = "KDD_THREADS"

# CLI exit codes
EXIT_OK: Final[int] = 0
EXIT_ERROR: Final[int] = 1
EXIT_USAGE: Final[int] = 2
EXIT_CONFIG: Final[int] = 3
EXIT_NOT_FOUND: Final[int] = 4
EXIT_DIMENSION: Final[int] = 5
EXIT_FORMAT: Final[int] = 6
EXIT_CONSISTENCY: Final[int] = 7
EXIT_SIZE_LIMIT: Final[int] = 8
EXIT_CONVERGENCE: Final[int] = 9
EXIT_VALIDATION: Final[int] = 10

# Consistency tolerance for CLI cross-checks
CONSISTENCY_RTOL: Final[float] = 1e-8

# Identification written into manifests and sidecars
PRODUCER: Final[str] = f"kdd-sampling/{__version__}"
