"""Experiment configuration documents."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Self

from pydantic import BaseModel, Field, ValidationError, model_validator

from .const import (
    DEFAULT_CG_MAX_ITER,
    DEFAULT_CG_TOL,
    DEFAULT_LAMBDA,
    DEFAULT_REPLICAS,
    Algorithm,
    CoilProfile,
    ModelKind,
    SupportProfile,
    TieBreak,
)
from .exceptions import KddConfigError


class ModelSection(BaseModel):
    """Sensitivity model of an experiment."""

    model_config = {"frozen": True, "extra": "forbid"}

    kind: ModelKind = ModelKind.COILS
    phase_dims: tuple[int, ...]
    readout_length: int | None = Field(default=None, ge=1)
    frames: int = Field(default=1, ge=1)
    coils: int = Field(default=1, ge=1)
    coil_profile: CoilProfile = CoilProfile.GAUSSIAN
    support: SupportProfile = SupportProfile.FULL
    basis_size: int | None = Field(default=None, ge=1)
    basis_order: int = Field(default=3, ge=0)
    seed: int = 0
    sensitivity_path: str | None = None

    @model_validator(mode="after")
    def _check_model(self) -> Self:
        if not 1 <= len(self.phase_dims) <= 2 or any(n < 1 for n in self.phase_dims):
            raise ValueError("phase_dims must hold 1 or 2 positive sizes")
        if self.kind is ModelKind.COILS_BASIS and self.basis_size is None:
            raise ValueError("kind 'coils+basis' needs basis_size")
        if self.kind is not ModelKind.COILS_BASIS and self.basis_size is not None:
            raise ValueError("basis_size applies to kind 'coils+basis' only")
        return self

    @property
    def spatial_dims(self) -> tuple[int, ...]:
        """Image grid; the readout dimension, when present, comes first."""
        if self.readout_length is None:
            return self.phase_dims
        return (self.readout_length, *self.phase_dims)

    @property
    def readout_axis(self) -> int | None:
        """Index of the readout within the spatial dimensions."""
        return None if self.readout_length is None else 0


class DesignArm(BaseModel):
    """One pattern generator to run and evaluate."""

    model_config = {"frozen": True, "extra": "forbid"}

    name: str
    algorithm: Algorithm
    acceleration: float | None = Field(default=None, gt=0)
    total: int | None = Field(default=None, ge=0)
    quotas: tuple[int, ...] | None = None
    even_quotas: bool = False
    sparse_keep: int | float | None = None
    tie_break: TieBreak = TieBreak.LEXICOGRAPHIC
    allow_repeats: bool = True
    seed: int = 0
    r_y: int = Field(default=1, ge=1)
    r_z: int = Field(default=1, ge=1)
    shift: int = 0
    r_min: float | None = Field(default=None, gt=0)
    anisotropy: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def _check_arm(self) -> Self:
        if self.algorithm is not Algorithm.UNIFORM and (self.acceleration is None) == (
            self.total is None
        ):
            raise ValueError("give exactly one of acceleration or total")
        if self.quotas is not None and self.even_quotas:
            raise ValueError("quotas and even_quotas are mutually exclusive")
        if self.sparse_keep is not None and self.algorithm is not Algorithm.APPROX:
            raise ValueError("sparse_keep applies to the approx algorithm only")
        return self

    def sample_count(self, candidates: int) -> int:
        """Total samples for a grid with ``candidates`` (k, t) locations."""
        if self.total is not None:
            return self.total
        if self.acceleration is None:
            raise ValueError("arm has neither total nor acceleration")
        return round(candidates / self.acceleration)


class ReconSection(BaseModel):
    """Reconstruction and g-factor settings."""

    model_config = {"frozen": True, "extra": "forbid", "populate_by_name": True}

    lam: float = Field(default=DEFAULT_LAMBDA, ge=0, alias="lambda")
    replicas: int = Field(default=DEFAULT_REPLICAS, ge=2)
    tol: float = Field(default=DEFAULT_CG_TOL, gt=0)
    max_iter: int = Field(default=DEFAULT_CG_MAX_ITER, ge=1)
    seed: int = 0
    analytic: bool = False


class ExperimentConfig(BaseModel):
    """A complete experiment: model, design arms, reconstruction and output."""

    model_config = {"frozen": True, "extra": "forbid"}

    model: ModelSection
    designs: tuple[DesignArm, ...] = Field(min_length=1)
    recon: ReconSection = Field(default_factory=ReconSection)
    output_dir: str = "out"

    @model_validator(mode="after")
    def _check_names(self) -> Self:
        names = [arm.name for arm in self.designs]
        if len(set(names)) != len(names):
            raise ValueError("design arm names must be unique")
        return self


def parse_config(data: object) -> ExperimentConfig:
    """Validate a decoded JSON document.

    Raises:
        KddConfigError: On any schema violation.
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise KddConfigError(f"Invalid experiment configuration: {err}") from err


def load_config(path: Path | str) -> ExperimentConfig:
    """Read and validate an experiment configuration file.

    Raises:
        FileNotFoundError: If the file does not exist.
        KddConfigError: If it is not JSON or violates the schema.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise KddConfigError(f"{path} is not valid JSON: {err}") from err
    return parse_config(data)
