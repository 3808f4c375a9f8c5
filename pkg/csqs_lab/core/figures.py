"""
带说明的图面板及其数据复现

场类图每个面板写出一个 Wigner 场，度量类图各写一张扫描表，绘图交给外部工具。
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .config import current_config
from .config_models import Tolerances
from .csqs_model import StateParams, normalize
from .exceptions import UsageError
from .loss_channel import LossParams, lossy_field
from .phase_space import PhaseGrid, field_minimum, negativity_volume, wigner_field
from .results import OutputFormat, write_field, write_table
from .sweep import SweepSpec, SweepTable, run_sweep

logger = logging.getLogger(__name__)

SQRT_HALF = 1 / math.sqrt(2)
SWEEP_R_VALUES = (0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class Panel:
    figure: str
    panel: str
    kind: str  # "field", "loss_field" or "sweep"
    alpha: float = 0.0
    t: float = 1.0
    kappa_t: Optional[float] = None
    columns: Tuple[str, ...] = ()

    @property
    def stem(self) -> str:
        return f"{self.figure}{self.panel}"

    def describe(self) -> str:
        if self.kind == "sweep":
            return f"sweep of {', '.join(self.columns[3:])} over α for r ∈ {list(SWEEP_R_VALUES)}"
        text = f"α={self.alpha:g}, t={self.t:.6g}"
        if self.kappa_t is not None:
            text += f", κt={self.kappa_t:g}"
        return text


def _field_panels(figure: str, params: List[Tuple[float, float]], kappa_t=None) -> List[Panel]:
    kind = "field" if kappa_t is None else "loss_field"
    return [
        Panel(figure, "abcdefghi"[i], kind, alpha, t, kappa_t)
        for i, (alpha, t) in enumerate(params)
    ]


def _sweep_panel(figure: str, *measures: str) -> List[Panel]:
    return [Panel(figure, "", "sweep", columns=("alpha", "r", "t", *measures))]


PANELS: Dict[str, List[Panel]] = {
    "fig2": _field_panels(
        "fig2",
        [(0.5, 1.0), (0.5, SQRT_HALF), (0.5, 0.0), (1.0, 0.5), (1.5, 0.5), (1.75, 0.5)],
    ),
    "fig3": _sweep_panel("fig3", "LE", "LE_printed"),
    "fig4": _sweep_panel("fig4", "N_rho"),
    "fig5": _sweep_panel("fig5", "WLN", "WLN_printed"),
    "fig6": _sweep_panel("fig6", "delta_NG"),
    "fig7": (
        [Panel("fig7", "abc"[i], "loss_field", 1.5, SQRT_HALF, k) for i, k in enumerate((0.1, 0.3, 0.5))]
        + [Panel("fig7", "def"[i], "loss_field", 0.5, t, 0.3) for i, t in enumerate((1.0, SQRT_HALF, 0.0))]
        + [Panel("fig7", "ghi"[i], "loss_field", a, SQRT_HALF, 0.3) for i, a in enumerate((1.0, 1.5, 1.75))]
    ),
}


@dataclass(frozen=True)
class ManifestEntry:
    figure: str
    panel: str
    path: Path
    description: str
    min_value: Optional[float] = None
    negativity_volume: Optional[float] = None


def _state(panel: Panel, tol):
    return normalize(StateParams.from_t(panel.alpha, panel.t), tol)


def _reproduce_panel(
    panel: Panel,
    out_dir: Path,
    fmt: OutputFormat,
    workers: Optional[int],
    grid_points: int,
    alpha_step: float,
    tol: Optional[Tolerances],
    sweeps: Dict[SweepSpec, SweepTable],
) -> ManifestEntry:
    path = Path(out_dir) / f"{panel.stem}.{fmt}"
    meta = {"figure": panel.figure, "panel": panel.panel}

    if panel.kind == "sweep":
        spec = SweepSpec(0.01, 3.0, alpha_step, SWEEP_R_VALUES, grid_points=grid_points)
        if spec not in sweeps:
            sweeps[spec] = run_sweep(spec, workers, tol)
        table = sweeps[spec]
        indices = [table.columns.index(column) for column in panel.columns]
        rows = [[row[i] for i in indices] for row in table.rows]
        write_table(rows, panel.columns, path, fmt, {**meta, "sweep": spec.as_dict()})
        return ManifestEntry(panel.figure, panel.panel, path, panel.describe())

    state = _state(panel, tol)
    grid = PhaseGrid.for_alpha(panel.alpha, points=grid_points)
    meta.update({"alpha_re": panel.alpha, "alpha_im": 0.0, "t": state.t, "r": state.r})
    if panel.kind == "field":
        field = wigner_field(state, grid, workers)
    else:
        loss = LossParams.from_kappa_t(panel.kappa_t)
        meta.update(loss.as_dict())
        field = lossy_field(state, loss, grid, workers, tol)
    write_field(field, path, fmt, meta)
    return ManifestEntry(
        panel.figure,
        panel.panel,
        path,
        panel.describe(),
        min_value=field_minimum(field)[0],
        negativity_volume=negativity_volume(field),
    )


def reproduce(
    figure: str,
    out_dir: Path,
    fmt: OutputFormat = "csv",
    workers: Optional[int] = None,
    grid_points: Optional[int] = None,
    alpha_step: float = 0.05,
    tol: Optional[Tolerances] = None,
) -> List[ManifestEntry]:
    """将 `figure` 的每个面板（"all" 表示全部图）写到 out_dir 下"""
    if figure == "all":
        figures = list(PANELS)
    elif figure in PANELS:
        figures = [figure]
    else:
        raise UsageError(
            f"Unknown figure id: {figure}",
            details={"figure": figure, "known": sorted(PANELS) + ["all"]},
        )

    grid_points = grid_points or current_config().grid.figure_points
    # fig3 至 fig6 共用一次扫描，各面板只取自己的列
    sweeps: Dict[SweepSpec, SweepTable] = {}
    manifest = []
    for fig in figures:
        for panel in PANELS[fig]:
            logger.info(f"Reproducing {panel.stem}: {panel.describe()}")
            manifest.append(
                _reproduce_panel(
                    panel, out_dir, fmt, workers, grid_points, alpha_step, tol, sweeps
                )
            )
    return manifest
