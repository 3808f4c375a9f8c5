"""
作用于 CSQS 的光子损耗

闭式解直接计算演化后的 Wigner 函数；数值基准用振幅阻尼 Kraus 算符演化截断后的
密度算符，再由位移宇称读出 Wigner 函数。
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import current_config, current_tolerances
from .config_models import Tolerances
from .csqs_model import NormalizedCsqs, csqs_density
from .exceptions import InadequateGridError, UsageError
from .fock_core import DensityOperator, amplitude_damping_kraus
from .phase_space import (
    PhaseGrid,
    WignerField,
    field_from_function,
    negativity_volume,
    wigner_closed,
    wigner_closed_array,
    wigner_field_oracle,
    wigner_oracle,
)

logger = logging.getLogger(__name__)

# 损耗比例低于此值时，演化后的场即原场
SMALL_T = 1e-12


@dataclass(frozen=True)
class LossParams:
    """约化时间 κt 与损耗比例 T = 1 − e^{−2κt}"""

    kappa_t: float
    T: float

    def __post_init__(self):
        if not math.isfinite(self.kappa_t) or self.kappa_t < 0:
            raise UsageError(
                f"kappa_t must be finite and >= 0 (got {self.kappa_t})",
                details={"kappa_t": self.kappa_t},
            )
        expected = -math.expm1(-2.0 * self.kappa_t)
        if abs(self.T - expected) > 1e-15 or not 0.0 <= self.T <= 1.0:
            raise UsageError(
                f"T={self.T} inconsistent with kappa_t={self.kappa_t}",
                details={"kappa_t": self.kappa_t, "T": self.T, "expected": expected},
            )

    @classmethod
    def from_kappa_t(cls, kappa_t: float) -> "LossParams":
        kappa_t = float(kappa_t)
        if not math.isfinite(kappa_t) or kappa_t < 0:
            raise UsageError(
                f"kappa_t must be finite and >= 0 (got {kappa_t})",
                details={"kappa_t": kappa_t},
            )
        return cls(kappa_t=kappa_t, T=-math.expm1(-2.0 * kappa_t))

    def as_dict(self) -> dict:
        return {"kappa_t": self.kappa_t, "T": self.T}


def transmissivity(loss: LossParams) -> float:
    """e^{−2κt}，场能量的保留比例"""
    return math.exp(-2.0 * loss.kappa_t)


def lossy_wigner_closed_array(
    state: NormalizedCsqs, loss: LossParams, zeta: np.ndarray
) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=np.complex128)
    if loss.kappa_t == 0 or loss.T < SMALL_T:
        return wigner_closed_array(state, zeta)

    alpha, t, r, T = state.alpha, state.t, state.r, loss.T
    damped = alpha * math.exp(-loss.kappa_t)
    eta = zeta * math.exp(-loss.kappa_t) + T * alpha
    shifted = 2.0 * eta - alpha
    # (2/T)(|η|² − |ζ|² − T|α|²) 化简为 −2|ζ − αe^{−κt}|²
    exponent = -2.0 * np.abs(zeta - damped) ** 2
    bracket = (
        t * t * abs(alpha) ** 2
        + r * r * (-1.0 + 2.0 * T + np.abs(shifted) ** 2)
        + 2.0 * r * t * np.real(shifted * alpha)
    )
    return (2.0 * state.n_const**2 / np.pi) * np.exp(exponent) * bracket


def lossy_wigner_closed(state: NormalizedCsqs, loss: LossParams, zeta: complex) -> float:
    if loss.kappa_t == 0 or loss.T < SMALL_T:
        return wigner_closed(state, zeta)
    return float(lossy_wigner_closed_array(state, loss, np.array([complex(zeta)]))[0])


def lossy_density(
    state: NormalizedCsqs,
    loss: LossParams,
    cutoff: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> DensityOperator:
    """
    经 Kraus 演化的 |ψ⟩⟨ψ|，在态的截断（拟合值或给定值）之上
    再加配置的 Wigner 余量。
    """
    headroom = current_config().oracle.wigner_headroom
    rho = csqs_density(state, headroom, tol, cutoff)
    return amplitude_damping_kraus(rho, loss.kappa_t)


def lossy_wigner_oracle(
    state: NormalizedCsqs,
    loss: LossParams,
    zeta: complex,
    cutoff: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> float:
    return wigner_oracle(lossy_density(state, loss, cutoff, tol), zeta, tol)


def lossy_field(
    state: NormalizedCsqs,
    loss: LossParams,
    grid: PhaseGrid,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> WignerField:
    tol = current_tolerances(tol)
    center = state.alpha * math.exp(-loss.kappa_t)
    if not grid.covers(center):
        logger.warning(f"Grid {grid.as_dict()} clips the evolved field around {center}")

    field = field_from_function(
        grid, lambda row: lossy_wigner_closed_array(state, loss, row), workers
    )
    if abs(field.total_integral - 1.0) > tol.eps_grid:
        raise InadequateGridError(
            f"lossy field integrates to {field.total_integral:.6f}",
            details={"total_integral": field.total_integral, **loss.as_dict()},
        )
    return field


def lossy_field_oracle(
    state: NormalizedCsqs,
    loss: LossParams,
    grid: PhaseGrid,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
    cutoff: Optional[int] = None,
) -> WignerField:
    return wigner_field_oracle(lossy_density(state, loss, cutoff, tol), grid, workers, tol)


def negativity_profile(
    state: NormalizedCsqs,
    kappa_ts: Sequence[float],
    grid: PhaseGrid,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> List[Tuple[float, float]]:
    """各 κt 下演化场的负体积，按输入顺序"""
    profile = []
    for kappa_t in kappa_ts:
        field = lossy_field(state, LossParams.from_kappa_t(kappa_t), grid, workers, tol)
        profile.append((float(kappa_t), negativity_volume(field)))
    return profile
