"""
CSQS 的非经典性与非高斯性度量

每个度量都有闭式解和一条独立的数值基准路径:

- 线性熵势: 闭式解 对照 分束器 + 偏迹
- 斜信息度量: 闭式矩 对照 升降算符矩
- 协方差矩阵与非高斯相对熵: 同上
- Wigner 对数负性: 对闭式场做数值求积

与基准不符的印刷闭式以 "printed" 变体保留，从不作为真值。
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.special import xlogy

from .config import current_tolerances
from .config_models import Tolerances
from .csqs_model import (
    NormalizedCsqs,
    csqs_ket,
    moment_closed,
    moment_oracle_for,
)
from .exceptions import CovarianceValidityError, DomainError, NumericalDomainError
from .fock_core import beam_splitter_50_50, partial_trace_first, purity
from .phase_space import PhaseGrid, wln_numeric, wln_printed_closed

logger = logging.getLogger(__name__)

# 纯态不确定性下界 det σ ≥ 1，留出舍入余地
UNCERTAINTY_SLACK = 1e-9
# 低于此值说明矩本身有误，而非舍入
COVARIANCE_FAILURE_SLACK = 1e-6

MeasureName = Literal["LE", "N_rho", "WLN", "delta_NG"]


@dataclass(frozen=True)
class CovarianceMatrix:
    """正交分量协方差，真空为单位阵，p = (a+a†)/√2, q = (a−a†)/(i√2)."""

    s_pp: float
    s_qq: float
    s_pq: float

    @property
    def determinant(self) -> float:
        return self.s_pp * self.s_qq - self.s_pq * self.s_pq

    def as_array(self) -> np.ndarray:
        """[[σ_qq, σ_qp], [σ_qp, σ_pp]]."""
        return np.array([[self.s_qq, self.s_pq], [self.s_pq, self.s_pp]])

    def check_uncertainty(self, slack: float = UNCERTAINTY_SLACK) -> "CovarianceMatrix":
        if self.determinant < 1.0 - slack:
            raise CovarianceValidityError(
                f"det σ = {self.determinant:.12g} violates the uncertainty bound",
                details={"s_pp": self.s_pp, "s_qq": self.s_qq, "s_pq": self.s_pq},
            )
        return self


class MeasureReport(BaseModel):
    """由闭式解和/或数值基准求得的单个度量"""

    name: MeasureName
    closed_value: Optional[float] = None
    oracle_value: Optional[float] = None
    delta: Optional[float] = None
    method_notes: str = ""
    method: str = "closed-form"
    variant: Literal["primary", "printed"] = "primary"

    @model_validator(mode="after")
    def _fill_delta(self) -> "MeasureReport":
        if self.closed_value is not None and self.oracle_value is not None:
            self.delta = abs(self.closed_value - self.oracle_value)
        return self


# --- 线性熵 ---


def linear_entropy_closed(state: NormalizedCsqs) -> float:
    """
    1 − Tr ρ_B² with Tr ρ_B² = N⁴(|c|⁴ + 2r²|c|² + r⁴/2),
    |c|² = |α|² + rt(α² + α*²).
    """
    t, r = state.t, state.r
    c2 = abs(state.alpha) ** 2 + 2.0 * r * t * (state.alpha**2).real
    return 1.0 - state.n_const**4 * (c2 * c2 + 2.0 * r * r * c2 + 0.5 * r**4)


def linear_entropy_printed_closed(
    state: NormalizedCsqs, tol: Optional[Tolerances] = None
) -> float:
    """印刷闭式，r⁴ 项 (1 + 5|α|² + 2|α|⁴)/2 按原样保留"""
    tol = current_tolerances(tol)
    t, r, alpha = state.t, state.r, state.alpha
    conj = alpha.conjugate()
    a2 = abs(alpha) ** 2
    bracket = (
        t**4 * a2 * a2
        + t**3 * r * (2 * alpha**2 * a2 + 2 * conj**2 * a2)
        + t * t * r * r * (2 * a2 * (1 + 2 * a2) + alpha**4 + conj**4)
        + t * r**3 * (2 * alpha**2 * (1 + a2) + 2 * conj**2 * (1 + a2))
        + r**4 * (1 + 5 * a2 + 2 * a2 * a2) / 2
    )
    value = 1.0 - state.n_const**4 * bracket
    if abs(value.imag) > tol.imag_residue:
        raise DomainError(
            f"linear entropy has imaginary residue {value.imag:.3e}",
            details={"imag": value.imag},
        )
    return float(value.real)


def linear_entropy_oracle(
    state: NormalizedCsqs,
    cutoff: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> float:
    """在 50:50 分束器上与真空混合后，单个输出端口的 1 − 纯度"""
    rho_b = partial_trace_first(beam_splitter_50_50(csqs_ket(state, 0, tol, cutoff)))
    return 1.0 - purity(rho_b)


# --- 斜信息 ---


def skew_closed(state: NormalizedCsqs, tol: Optional[Tolerances] = None) -> float:
    """由闭式矩计算 1/2 + ⟨a†a⟩ − ⟨a†⟩⟨a⟩"""
    if state.alpha == 0:
        logger.debug("skew_closed at α=0 uses the oracle")
        return skew_oracle(state, tol)
    mean = moment_closed(state, 0, 1, tol)
    return 0.5 + moment_closed(state, 1, 1, tol).real - abs(mean) ** 2


def skew_oracle(
    state: NormalizedCsqs, tol: Optional[Tolerances] = None, cutoff: Optional[int] = None
) -> float:
    mean = moment_oracle_for(state, 0, 1, tol, cutoff)
    return 0.5 + moment_oracle_for(state, 1, 1, tol, cutoff).real - abs(mean) ** 2


# --- 协方差与相对熵 ---


def covariance_from_moments(a1: complex, a2: complex, n1: float) -> CovarianceMatrix:
    """由 ⟨a⟩、⟨a²⟩ 与 ⟨a†a⟩ 组装 σ"""
    a1, a2 = complex(a1), complex(a2)
    return CovarianceMatrix(
        s_pp=2.0 * a2.real + 2.0 * n1 + 1.0 - 4.0 * a1.real**2,
        s_qq=-2.0 * a2.real + 2.0 * n1 + 1.0 - 4.0 * a1.imag**2,
        s_pq=2.0 * a2.imag - 4.0 * a1.real * a1.imag,
    )


def covariance(state: NormalizedCsqs, tol: Optional[Tolerances] = None) -> CovarianceMatrix:
    return covariance_from_moments(
        moment_closed(state, 0, 1, tol),
        moment_closed(state, 0, 2, tol),
        moment_closed(state, 1, 1, tol).real,
    )


def covariance_oracle(
    state: NormalizedCsqs, tol: Optional[Tolerances] = None, cutoff: Optional[int] = None
) -> CovarianceMatrix:
    return covariance_from_moments(
        moment_oracle_for(state, 0, 1, tol, cutoff),
        moment_oracle_for(state, 0, 2, tol, cutoff),
        moment_oracle_for(state, 1, 1, tol, cutoff).real,
    )


def h_entropy(x: float) -> float:
    """((x+1)/2)log₂((x+1)/2) − ((x−1)/2)log₂((x−1)/2), h(1) = 0."""
    x = max(float(x), 1.0)
    plus, minus = (x + 1.0) / 2.0, (x - 1.0) / 2.0
    return float((xlogy(plus, plus) - xlogy(minus, minus)) / math.log(2.0))


def _entropy_of(sigma: CovarianceMatrix) -> float:
    det = sigma.determinant
    if det < 1.0 - COVARIANCE_FAILURE_SLACK:
        raise CovarianceValidityError(
            f"det σ = {det:.12g} < 1; the moments are inconsistent",
            details={"determinant": det, "s_pp": sigma.s_pp, "s_qq": sigma.s_qq},
        )
    return h_entropy(math.sqrt(max(det, 1.0)))


def rel_entropy_ng(state: NormalizedCsqs, tol: Optional[Tolerances] = None) -> float:
    return _entropy_of(covariance(state, tol))


def rel_entropy_ng_oracle(
    state: NormalizedCsqs, tol: Optional[Tolerances] = None, cutoff: Optional[int] = None
) -> float:
    return _entropy_of(covariance_oracle(state, tol, cutoff))


# --- 报告组装 ---


def evaluate_measures(
    state: NormalizedCsqs,
    with_oracle: bool = False,
    grid: Optional[PhaseGrid] = None,
    workers: Optional[int] = None,
    tol: Optional[Tolerances] = None,
    cutoff: Optional[int] = None,
) -> List[MeasureReport]:
    """
    全部四个度量，另附印刷的 LE 与 WLN 闭式作为额外行。

    `cutoff` 固定所有基准的 Fock 截断，不再拟合。
    """
    tol = current_tolerances(tol)
    tag = "closed-form+oracle" if with_oracle else "closed-form"
    reports: List[MeasureReport] = []

    le_oracle = linear_entropy_oracle(state, cutoff, tol) if with_oracle else None
    reports.append(
        MeasureReport(
            name="LE",
            closed_value=linear_entropy_closed(state),
            oracle_value=le_oracle,
            method=tag,
        )
    )
    reports.append(
        MeasureReport(
            name="LE",
            closed_value=linear_entropy_printed_closed(state, tol),
            oracle_value=le_oracle,
            method=tag,
            variant="printed",
            method_notes="printed form; r⁴ term differs from the exact expansion",
        )
    )

    reports.append(
        MeasureReport(
            name="N_rho",
            closed_value=skew_closed(state, tol),
            oracle_value=skew_oracle(state, tol, cutoff) if with_oracle else None,
            method=tag,
            method_notes="α=0: closed value from the ladder oracle" if state.alpha == 0 else "",
        )
    )

    wln = wln_numeric(state, grid, workers, tol)
    reports.append(
        MeasureReport(
            name="WLN",
            closed_value=wln,
            method="numeric-quadrature",
            method_notes="log₂ ∫|W| of the closed-form field",
        )
    )
    try:
        printed_wln, note = wln_printed_closed(state), "printed closed form"
    except NumericalDomainError as e:
        printed_wln, note = None, f"printed closed form undefined: {e.message}"
    reports.append(
        MeasureReport(
            name="WLN",
            closed_value=printed_wln,
            oracle_value=wln,
            method="closed-form+numeric",
            variant="printed",
            method_notes=note,
        )
    )

    reports.append(
        MeasureReport(
            name="delta_NG",
            closed_value=rel_entropy_ng(state, tol),
            oracle_value=rel_entropy_ng_oracle(state, tol, cutoff) if with_oracle else None,
            method=tag,
        )
    )
    return reports
