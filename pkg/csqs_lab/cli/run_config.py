"""
Run configuration for a single CLI invocation.

Values come from command-line flags, then the config file (same key names as
the flags, underscored), then the model defaults.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.config import current_config
from ..core.config_models import LatticeConfig
from ..core.config_sources import deep_merge
from ..core.csqs_model import StateParams
from ..core.exceptions import UsageError
from ..core.phase_space import PhaseGrid

logger = logging.getLogger(__name__)

Subcommand = Literal["wigner", "measures", "sweep", "loss", "compare", "reproduce"]
STATE_COMMANDS = ("wigner", "measures", "loss")


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="ignore")

    subcommand: Subcommand
    alpha: float = 0.0
    alpha_im: float = 0.0
    t: Optional[float] = None
    r: Optional[float] = None
    t_negative: bool = False

    half_width: Optional[float] = Field(None, gt=0)
    points: Optional[int] = Field(None, ge=3)

    kappa_t: float = Field(0.0, ge=0)

    alpha_start: float = 0.01
    alpha_stop: float = 3.0
    alpha_step: float = Field(0.05, gt=0)
    r_values: List[float] = Field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])

    figure: Optional[str] = None
    output: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    oracle: bool = False
    cutoff: Optional[int] = Field(None, ge=1)

    lattice: Optional[Dict[str, Any]] = None
    max_moment_order: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def _one_weight(self) -> "RunConfig":
        if self.subcommand in STATE_COMMANDS and (self.t is None) == (self.r is None):
            raise ValueError("give exactly one of --t / --r")
        if self.points is not None and self.points % 2 == 0:
            raise ValueError("--points must be odd")
        if self.cutoff is not None and not self.oracle and self.subcommand in STATE_COMMANDS:
            logger.warning(f"cutoff {self.cutoff} only applies to oracle evaluations (--oracle)")
        return self

    @property
    def alpha_complex(self) -> complex:
        return complex(self.alpha, self.alpha_im)

    def state_params(self) -> StateParams:
        if self.r is not None:
            return StateParams.from_r(self.alpha_complex, self.r, self.t_negative)
        return StateParams.from_t(self.alpha_complex, self.t)

    def grid(self) -> PhaseGrid:
        """Flags override the configured grid; auto-centering still applies."""
        cfg = current_config().grid
        if self.half_width is None:
            return PhaseGrid.for_alpha(self.alpha_complex, cfg, self.points)
        center = self.alpha_complex if abs(self.alpha_complex) > cfg.auto_center_threshold else 0j
        return PhaseGrid.square(self.half_width, self.points or cfg.points, center)

    def describe(self) -> Dict[str, Any]:
        """Parameters embedded in every emitted file."""
        data = {"alpha_re": self.alpha, "alpha_im": self.alpha_im}
        if self.subcommand in STATE_COMMANDS:
            params = self.state_params()
            data.update({"t": params.t, "r": params.r})
        if self.subcommand == "loss":
            data["kappa_t"] = self.kappa_t
            data["T"] = -math.expm1(-2.0 * self.kappa_t)
        if self.oracle and self.subcommand in ("measures", "loss"):
            data["oracle_cutoff"] = self.cutoff
        return data

    def audit_lattice(self) -> LatticeConfig:
        """Configured lattice, overlaid with --lattice file keys and --max-moment-order."""
        merged = deep_merge(current_config().lattice.model_dump(), self.lattice or {})
        if self.max_moment_order is not None:
            merged["max_moment_order"] = self.max_moment_order
        try:
            return LatticeConfig(**merged)
        except ValidationError as e:
            raise _usage_error(e, "audit lattice") from e


def build_run_config(
    subcommand: str, flags: Dict[str, Any], file_data: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """Merge flags > file > defaults; unset flags (None) fall through."""
    file_data = dict(file_data or {})
    # A weight given on the command line replaces the file's weight, whichever it is.
    if flags.get("t") is not None or flags.get("r") is not None:
        file_data.pop("t", None)
        file_data.pop("r", None)
    merged: Dict[str, Any] = dict(file_data)
    merged.update({key: value for key, value in flags.items() if value is not None})
    merged["subcommand"] = subcommand
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise _usage_error(e, "arguments") from e


def _usage_error(e: ValidationError, what: str) -> UsageError:
    messages = "; ".join(error["msg"] for error in e.errors(include_url=False))
    return UsageError(
        f"Invalid {what}: {messages}",
        code="usage",
        details={"errors": e.errors(include_url=False)},
    )
