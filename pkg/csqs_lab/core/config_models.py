"""
Pydantic models for csqs-lab configuration.

This module defines every tunable used by the numerical layer and the CLI:
truncation and quadrature tolerances, default phase-space grids, oracle
headroom and the audit tolerances. Defaults are chosen so that the oracle
agreement tolerances (1e-8 and looser) sit well above the truncation error.
"""

import math
from typing import Any, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Tolerances(BaseModel):
    """Truncation, positivity and quadrature tolerances."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    eps_tail: float = Field(
        1e-12, gt=0, lt=1, description="Maximum discarded Fock amplitude mass."
    )
    eps_psd: float = Field(
        1e-10, gt=0, description="Allowed negative eigenvalue of a density operator."
    )
    eps_norm: float = Field(
        1e-10, gt=0, description="Smallest admissible normalization argument."
    )
    eps_grid: float = Field(
        1e-3, gt=0, lt=1, description="Allowed deviation of a field integral from 1."
    )
    imag_residue: float = Field(
        1e-10, gt=0, description="Largest imaginary part discarded from real results."
    )


class GridConfig(BaseModel):
    """Default phase-space grid."""

    model_config = ConfigDict(extra="ignore")

    half_width: float = Field(6.0, gt=0, description="Half-width of the square grid.")
    points: int = Field(401, ge=3, description="Points per axis (odd).")
    auto_center_threshold: float = Field(
        2.0, ge=0, description="Center the grid on α when |α| exceeds this."
    )
    figure_points: int = Field(
        121, ge=3, description="Points per axis for reproduced figure panels (odd)."
    )

    @model_validator(mode="after")
    def _odd_points(self) -> "GridConfig":
        if self.points % 2 == 0 or self.figure_points % 2 == 0:
            raise ValueError("grid point counts must be odd")
        return self


class OracleConfig(BaseModel):
    """Oracle headroom and closed-form vs. oracle audit tolerances."""

    model_config = ConfigDict(extra="ignore")

    wigner_headroom: int = Field(
        16, ge=0, description="Extra Fock levels for displaced-parity oracles."
    )
    wigner: float = Field(1e-8, gt=0)
    moments: float = Field(1e-8, gt=0)
    linear_entropy: float = Field(1e-8, gt=0)
    skew: float = Field(1e-9, gt=0)
    covariance: float = Field(1e-9, gt=0)
    loss: float = Field(1e-6, gt=0)


def _as_pair(value: Any) -> Tuple[float, float]:
    """数字、"a+bj" 字符串或 [re, im] 对，统一为 (re, im)。"""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex point needs [re, im], got {value!r}")
        return float(value[0]), float(value[1])
    if isinstance(value, str):
        z = complex(value.replace(" ", ""))
    else:
        z = complex(value)
    return z.real, z.imag


class LatticeConfig(BaseModel):
    """compare 审计遍历的参数点阵。"""

    model_config = ConfigDict(extra="ignore")

    alphas: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(0, 0), (0.3, 0), (0.8, 0.4), (1.2, 0), (-0.7, 1.1), (1.5, 0), (2.0, 0)],
        min_length=1,
    )
    t_values: List[float] = Field(
        default_factory=lambda: [1.0, 0.8, 1 / math.sqrt(2), 0.3, 0.0, -0.6], min_length=1
    )
    gammas: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(0, 0), (0.5, 0), (0.3, 0.1), (-1.0, 0.7), (1.5, -0.5)],
        min_length=1,
    )
    kappa_ts: List[float] = Field(default_factory=lambda: [0.1, 0.3, 0.5], min_length=1)
    zetas: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(0, 0), (0.5, 0), (1.0, 0.5), (-0.4, -0.8)], min_length=1
    )
    max_moment_order: int = Field(4, ge=0, le=12)
    profile_r: float = Field(0.5, gt=0, le=1)
    wln_grid_points: int = Field(201, ge=3)

    @field_validator("alphas", "gammas", "zetas", mode="before")
    @classmethod
    def _complex_points(cls, value: Any) -> Any:
        if not isinstance(value, (list, tuple)):
            value = [value]
        return [_as_pair(item) for item in value]

    @field_validator("t_values")
    @classmethod
    def _unit_weights(cls, value: List[float]) -> List[float]:
        bad = [t for t in value if not -1.0 <= t <= 1.0]
        if bad:
            raise ValueError(f"t values must lie in [-1, 1], got {bad}")
        return value

    @field_validator("kappa_ts")
    @classmethod
    def _nonnegative_times(cls, value: List[float]) -> List[float]:
        bad = [k for k in value if not (math.isfinite(k) and k >= 0)]
        if bad:
            raise ValueError(f"kappa_t values must be finite and >= 0, got {bad}")
        return value

    @model_validator(mode="after")
    def _odd_grid(self) -> "LatticeConfig":
        if self.wln_grid_points % 2 == 0:
            raise ValueError("wln_grid_points must be odd")
        return self


class LoggingConfig(BaseModel):
    """Configuration for logging."""

    model_config = ConfigDict(extra="ignore")

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        "WARNING", description="The logging level."
    )


class LabConfig(BaseModel):
    """The main csqs-lab configuration model."""

    model_config = ConfigDict(extra="ignore")

    tolerances: Tolerances = Field(default_factory=Tolerances)
    grid: GridConfig = Field(default_factory=GridConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    lattice: LatticeConfig = Field(default_factory=LatticeConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    threads: Optional[int] = Field(
        None, ge=1, description="Upper bound on worker threads (CSQS_LAB_THREADS)."
    )
