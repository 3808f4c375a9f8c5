"""
在 (α, r) 上的参数扫描，每个点产生一行度量

行按 α 为主序并按索引组装，表格与线程数无关。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .config import current_tolerances
from .config_models import Tolerances
from .csqs_model import StateParams, normalize
from .exceptions import NumericalDomainError, UsageError
from .measures import (
    linear_entropy_closed,
    linear_entropy_printed_closed,
    rel_entropy_ng,
    skew_closed,
)
from .phase_space import PhaseGrid, wln_numeric, wln_printed_closed
from .workers import ordered_map

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "alpha",
    "r",
    "t",
    "LE",
    "N_rho",
    "WLN",
    "delta_NG",
    "LE_printed",
    "WLN_printed",
)


@dataclass(frozen=True)
class SweepSpec:
    """对每个 r，实数 α 从 alpha_start 到 alpha_stop（含端点）"""

    alpha_start: float
    alpha_stop: float
    alpha_step: float
    r_values: Tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    t_negative: bool = False
    grid_points: Optional[int] = None

    def __post_init__(self):
        if not self.alpha_start < self.alpha_stop:
            raise UsageError(
                "sweep needs alpha_start < alpha_stop",
                details={"start": self.alpha_start, "stop": self.alpha_stop},
            )
        if not self.alpha_step > 0:
            raise UsageError("sweep step must be > 0", details={"step": self.alpha_step})
        if not self.r_values:
            raise UsageError("sweep needs at least one r value")
        for r in self.r_values:
            if abs(r) > 1:
                raise UsageError(f"|r| must be <= 1 (got {r})", details={"r": r})
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))

    @property
    def alphas(self) -> List[float]:
        count = int(math.floor((self.alpha_stop - self.alpha_start) / self.alpha_step + 1e-9)) + 1
        return [self.alpha_start + k * self.alpha_step for k in range(count)]

    def points(self) -> List[Tuple[float, float]]:
        return [(alpha, r) for alpha in self.alphas for r in self.r_values]

    def as_dict(self) -> dict:
        return {
            "alpha_start": self.alpha_start,
            "alpha_stop": self.alpha_stop,
            "alpha_step": self.alpha_step,
            "r_values": list(self.r_values),
            "t_negative": self.t_negative,
            "grid_points": self.grid_points,
        }


@dataclass
class SweepTable:
    spec: SweepSpec
    columns: Tuple[str, ...] = SWEEP_COLUMNS
    rows: List[list] = field(default_factory=list)

    def column(self, name: str) -> list:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


def sweep_row(
    alpha: float,
    r: float,
    t_negative: bool = False,
    grid_points: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> list:
    """单个 (α, r) 上的全部度量，印刷闭式无定义处为 NaN"""
    state = normalize(StateParams.from_r(alpha, r, t_negative), tol)
    grid = PhaseGrid.for_alpha(alpha, points=grid_points)
    try:
        wln_printed = wln_printed_closed(state)
    except NumericalDomainError:
        wln_printed = math.nan
    return [
        alpha,
        r,
        state.t,
        linear_entropy_closed(state),
        skew_closed(state, tol),
        wln_numeric(state, grid, workers=1, tol=tol),
        rel_entropy_ng(state, tol),
        linear_entropy_printed_closed(state, tol),
        wln_printed,
    ]


def run_sweep(
    spec: SweepSpec,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> SweepTable:
    tol = current_tolerances(tol)
    points = spec.points()
    logger.info(f"Sweeping {len(points)} points ({len(spec.alphas)} α × {len(spec.r_values)} r)")
    rows = ordered_map(
        lambda point: sweep_row(point[0], point[1], spec.t_negative, spec.grid_points, tol),
        points,
        workers,
    )
    return SweepTable(spec=spec, rows=rows)
