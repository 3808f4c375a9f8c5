"""
相空间网格、Wigner 场与 Wigner 负性

WignerField 在 PhaseGrid 上采样 W(γ)，values[i, j] = W(x_i + i·y_j)，并缓存 W 与
|W| 的复合 Simpson 积分。积分对加权样本使用 math.fsum 累加，结果与各行在
线程间的分配方式无关。
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from .config import current_config, current_tolerances
from .config_models import GridConfig, Tolerances
from .csqs_model import NormalizedCsqs
from .exceptions import (
    DomainError,
    InadequateGridError,
    TailMassError,
    UnsupportedDomainError,
    UsageError,
)
from .fock_core import DensityOperator, displacement_matrix
from .workers import ordered_map

logger = logging.getLogger(__name__)

# α 到网格边缘的距离低于此值时，场被标记为截边
COVERAGE_MARGIN = 4.0


@dataclass(frozen=True)
class PhaseGrid:
    """Re(γ) × Im(γ) 上的矩形网格，每轴点数为奇数"""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        for name, count in (("nx", self.nx), ("ny", self.ny)):
            if count < 3 or count % 2 == 0:
                raise UsageError(
                    f"{name} must be odd and >= 3 (got {count})",
                    details={name: count},
                )
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise UsageError(
                "grid bounds must satisfy min < max",
                details={
                    "x": [self.x_min, self.x_max],
                    "y": [self.y_min, self.y_max],
                },
            )

    @classmethod
    def square(
        cls, half_width: float = 6.0, points: int = 401, center: complex = 0j
    ) -> "PhaseGrid":
        center = complex(center)
        return cls(
            x_min=center.real - half_width,
            x_max=center.real + half_width,
            y_min=center.imag - half_width,
            y_max=center.imag + half_width,
            nx=points,
            ny=points,
        )

    @classmethod
    def for_alpha(
        cls,
        alpha: complex,
        grid_config: Optional[GridConfig] = None,
        points: Optional[int] = None,
    ) -> "PhaseGrid":
        """默认正方形网格，|α| 超过阈值时以 α 为中心"""
        cfg = grid_config or current_config().grid
        alpha = complex(alpha)
        center = 0j
        if abs(alpha) > cfg.auto_center_threshold:
            center = alpha
            logger.debug(f"Centering grid on α={alpha}")
        return cls.square(cfg.half_width, points or cfg.points, center)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    @property
    def center(self) -> complex:
        return complex((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def covers(self, gamma: complex, margin: float = COVERAGE_MARGIN) -> bool:
        gamma = complex(gamma)
        return (
            self.x_min + margin <= gamma.real <= self.x_max - margin
            and self.y_min + margin <= gamma.imag <= self.y_max - margin
        )

    def as_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "nx": self.nx,
            "ny": self.ny,
        }


def simpson_weights(n: int, h: float) -> np.ndarray:
    """奇数 n 的复合 Simpson 权重 h/3·[1, 4, 2, 4, ..., 2, 4, 1]"""
    if n < 3 or n % 2 == 0:
        raise UsageError(f"Simpson rule needs an odd n >= 3 (got {n})", details={"n": n})
    weights = np.full(n, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    return weights * h / 3.0


def integrate(grid: PhaseGrid, values: np.ndarray) -> float:
    weights = np.outer(simpson_weights(grid.nx, grid.hx), simpson_weights(grid.ny, grid.hy))
    return math.fsum((weights * values).ravel())


@dataclass(frozen=True)
class WignerField:
    grid: PhaseGrid
    values: np.ndarray
    total_integral: float
    abs_integral: float

    @classmethod
    def from_values(cls, grid: PhaseGrid, values: np.ndarray) -> "WignerField":
        values = np.array(values, dtype=float, copy=True)
        if values.shape != (grid.nx, grid.ny):
            raise UsageError(
                "field shape does not match its grid",
                details={"shape": list(values.shape), "grid": [grid.nx, grid.ny]},
            )
        if not np.all(np.isfinite(values)):
            raise InadequateGridError("Wigner field contains non-finite samples")
        values.setflags(write=False)
        return cls(
            grid=grid,
            values=values,
            total_integral=integrate(grid, values),
            abs_integral=integrate(grid, np.abs(values)),
        )


def field_from_function(
    grid: PhaseGrid,
    row_fn: Callable[[np.ndarray], np.ndarray],
    workers: Optional[int] = None,
) -> WignerField:
    """逐行填充场，row_fn 将一行 γ 映射为 W 值"""
    ys = grid.ys
    rows = [x + 1j * ys for x in grid.xs]
    values = np.vstack(ordered_map(row_fn, rows, workers))
    return WignerField.from_values(grid, values)


# --- 闭式解 ---


def wigner_closed_array(state: NormalizedCsqs, gamma: np.ndarray) -> np.ndarray:
    """N²[|tα + r(2γ* − α*)|² − r²]·(2/π)exp(−2|γ − α|²)，逐元素计算"""
    gamma = np.asarray(gamma, dtype=np.complex128)
    alpha, t, r = state.alpha, state.t, state.r
    amplitude = t * alpha + r * (2.0 * np.conj(gamma) - np.conj(alpha))
    bracket = np.abs(amplitude) ** 2 - r * r
    gaussian = (2.0 / np.pi) * np.exp(-2.0 * np.abs(gamma - alpha) ** 2)
    return state.n_const**2 * bracket * gaussian


def wigner_closed(state: NormalizedCsqs, gamma: complex) -> float:
    return float(wigner_closed_array(state, np.array([complex(gamma)]))[0])


def wigner_field(
    state: NormalizedCsqs, grid: PhaseGrid, workers: Optional[int] = None
) -> WignerField:
    if not grid.covers(state.alpha):
        logger.warning(
            f"Grid {grid.as_dict()} leaves less than {COVERAGE_MARGIN} around α={state.alpha}"
        )
    return field_from_function(
        grid, lambda row: wigner_closed_array(state, row), workers
    )


# --- 数值基准 ---


def wigner_oracle(
    rho: DensityOperator, gamma: complex, tol: Optional[Tolerances] = None
) -> float:
    """
    (2/π) Tr[ρ D(γ) Π D(γ)†] = (2/π) Σ_{mn} ρ_{mn} (−1)^m ⟨n|D(2γ)|m⟩.
    """
    tol = current_tolerances(tol)
    top = float(rho.matrix[-1, -1].real)
    if top > tol.eps_tail:
        raise TailMassError(
            f"cutoff {rho.cutoff} too small: top level population {top:.3e}",
            details={"cutoff": rho.cutoff, "top_population": top},
        )

    disp = displacement_matrix(2.0 * complex(gamma), rho.cutoff)
    parity = (-1.0) ** np.arange(rho.cutoff + 1)
    value = (2.0 / np.pi) * np.sum(parity * np.einsum("mn,nm->m", rho.matrix, disp))
    if abs(value.imag) > tol.imag_residue:
        raise DomainError(
            f"Wigner oracle returned imaginary residue {value.imag:.3e}",
            details={"gamma": str(gamma), "imag": float(value.imag)},
        )
    return float(value.real)


def wigner_field_oracle(
    rho: DensityOperator,
    grid: PhaseGrid,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> WignerField:
    """逐点计算的基准场，开销随 cutoff² 增长，网格宜小"""
    tol = current_tolerances(tol)

    def row_fn(row: np.ndarray) -> np.ndarray:
        return np.array([wigner_oracle(rho, gamma, tol) for gamma in row])

    return field_from_function(grid, row_fn, workers)


# --- 场统计量 ---


def _point(field: WignerField, index: int) -> complex:
    i, j = np.unravel_index(index, field.values.shape)
    return complex(field.grid.xs[i], field.grid.ys[j])


def field_minimum(field: WignerField) -> Tuple[float, complex]:
    index = int(np.argmin(field.values))
    return float(field.values.ravel()[index]), _point(field, index)


def field_argmax(field: WignerField) -> Tuple[float, complex]:
    index = int(np.argmax(field.values))
    return float(field.values.ravel()[index]), _point(field, index)


def negativity_volume(field: WignerField) -> float:
    """∫ max(−W, 0) d²γ."""
    return integrate(field.grid, np.maximum(-field.values, 0.0))


def wln_from_field(field: WignerField, tol: Optional[Tolerances] = None) -> float:
    """场的积分在 eps_grid 内等于 1 时返回 log₂ ∫|W|"""
    tol = current_tolerances(tol)
    deviation = abs(field.total_integral - 1.0)
    if deviation > tol.eps_grid:
        raise InadequateGridError(
            f"field integrates to {field.total_integral:.6f}, not 1 ± {tol.eps_grid:.0e}",
            details={"total_integral": field.total_integral, "grid": field.grid.as_dict()},
        )
    return math.log2(field.abs_integral)


def wln_numeric(
    state: NormalizedCsqs,
    grid: Optional[PhaseGrid] = None,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> float:
    grid = grid or PhaseGrid.for_alpha(state.alpha)
    return wln_from_field(wigner_field(state, grid, workers), tol)


def wln_printed_closed(state: NormalizedCsqs) -> float:
    """
    log₂[N²((t + r)²α² − 5r²)]，实数 α 的印刷闭式。

    仅与 wln_numeric 并列报告，并非归一化态的 WLN。
    """
    alpha = state.alpha
    if alpha.imag != 0.0:
        raise UnsupportedDomainError(
            "the printed WLN closed form only exists for real α",
            details={"alpha": str(alpha)},
        )
    t, r, a = state.t, state.r, alpha.real
    argument = state.n_const**2 * ((t + r) ** 2 * a * a - 5.0 * r * r)
    if argument <= 0.0:
        raise DomainError(
            f"printed WLN closed form has non-positive argument {argument:.6g}",
            details={"argument": argument, "alpha": a, "t": t, "r": r},
        )
    return math.log2(argument)


def fock1_negativity_volume() -> float:
    """|1⟩ Wigner 函数的负体积，径向求积 (2e^{-1/2} − 1)"""

    def integrand(rho: float) -> float:
        return 2.0 * np.pi * rho * (2.0 / np.pi) * (1.0 - 4.0 * rho * rho) * np.exp(-2.0 * rho * rho)

    value, _ = quad(integrand, 0.0, 0.5, epsabs=1e-14, epsrel=1e-14)
    return float(value)
