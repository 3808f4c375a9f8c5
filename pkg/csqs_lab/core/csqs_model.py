"""
相干叠加量子态 N(t·a + r·a†)|α⟩

参数、归一化、数态振幅以及正规序矩 ⟨a†^m a^n⟩ 的闭式解。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import current_tolerances
from .config_models import Tolerances
from .exceptions import DegenerateStateError, TailMassError, UsageError
from .fock_core import (
    DensityOperator,
    FockVector,
    apply_annihilation,
    apply_creation,
    choose_cutoff,
    coherent_amplitudes,
    coherent_fock,
    fock_from_amplitudes,
    moment_oracle,
    projector,
    tail_mass,
)

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOLERANCE = 1e-12
# 余量搜索在相干估计之上最多尝试的层数
MAX_CUTOFF_STEPS = 400


@dataclass(frozen=True)
class StateParams:
    """位移 α 与叠加权重 t、r，满足 t² + r² = 1"""

    alpha: complex
    t: float
    r: float

    def __post_init__(self):
        alpha = complex(self.alpha)
        t, r = float(self.t), float(self.r)
        if not all(math.isfinite(x) for x in (alpha.real, alpha.imag, t, r)):
            raise UsageError(
                "state parameters must be finite",
                details={"alpha": str(alpha), "t": t, "r": r},
            )
        if abs(t * t + r * r - 1.0) > UNIT_CIRCLE_TOLERANCE:
            raise UsageError(
                f"t² + r² must equal 1 (got {t * t + r * r:.15g})",
                details={"t": t, "r": r},
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_r(cls, alpha: complex, r: float, negative_t: bool = False) -> "StateParams":
        """由 r 推出 t = ±√(1 − r²)，除非 negative_t 否则取非负分支"""
        if abs(r) > 1.0:
            raise UsageError(f"|r| must be <= 1 (got {r})", details={"r": r})
        t = math.sqrt(max(0.0, 1.0 - r * r))
        return cls(alpha, -t if negative_t else t, r)

    @classmethod
    def from_t(cls, alpha: complex, t: float, negative_r: bool = False) -> "StateParams":
        if abs(t) > 1.0:
            raise UsageError(f"|t| must be <= 1 (got {t})", details={"t": t})
        r = math.sqrt(max(0.0, 1.0 - t * t))
        return cls(alpha, t, -r if negative_r else r)


@dataclass(frozen=True)
class NormalizedCsqs:
    params: StateParams
    n_const: float

    @property
    def alpha(self) -> complex:
        return self.params.alpha

    @property
    def t(self) -> float:
        return self.params.t

    @property
    def r(self) -> float:
        return self.params.r


def normalization_argument(params: StateParams) -> float:
    """|α|² + rt(α² + α*²) + r²."""
    alpha = params.alpha
    return abs(alpha) ** 2 + 2.0 * params.r * params.t * (alpha * alpha).real + params.r**2


def normalize(params: StateParams, tol: Optional[Tolerances] = None) -> NormalizedCsqs:
    tol = current_tolerances(tol)
    argument = normalization_argument(params)
    if argument <= tol.eps_norm:
        raise DegenerateStateError(
            f"state cannot be normalized: argument {argument:.3e} <= {tol.eps_norm:.1e}",
            details={
                "alpha": str(params.alpha),
                "t": params.t,
                "r": params.r,
                "argument": argument,
            },
        )
    return NormalizedCsqs(params=params, n_const=1.0 / math.sqrt(argument))


# --- 数态基 ---


def _csqs_amplitudes(state: NormalizedCsqs, cutoff: int) -> np.ndarray:
    # ψ_n = N(t√(n+1) c_{n+1} + r√n c_{n-1})，c 为相干态振幅
    coherent = coherent_amplitudes(state.alpha, cutoff + 1)
    n = np.arange(cutoff + 1)
    amplitudes = state.t * np.sqrt(n + 1) * coherent[1:]
    amplitudes[1:] += state.r * np.sqrt(n[1:]) * coherent[: cutoff]
    return state.n_const * amplitudes


def csqs_fock(
    state: NormalizedCsqs, cutoff: int, tol: Optional[Tolerances] = None
) -> FockVector:
    """态在数态基下的振幅，截断于 cutoff"""
    if cutoff < 1:
        raise UsageError("cutoff must be >= 1", details={"cutoff": cutoff})
    return fock_from_amplitudes(_csqs_amplitudes(state, cutoff), tol)


def fit_cutoff(
    state: NormalizedCsqs, extra: int = 0, tol: Optional[Tolerances] = None
) -> int:
    """
    态自身尾部质量低于 eps_tail 的最小截断，从带两层余量的相干估计开始搜索，
    再加上 `extra` 个空层。
    """
    tol = current_tolerances(tol)
    start = choose_cutoff(state.alpha, 2, tol.eps_tail)
    for cutoff in range(start, start + MAX_CUTOFF_STEPS):
        amplitudes = _csqs_amplitudes(state, cutoff)
        missing = 1.0 - float(np.sum(np.abs(amplitudes) ** 2))
        if missing < tol.eps_tail:
            break
    else:
        raise TailMassError(
            f"no cutoff below {start + MAX_CUTOFF_STEPS} reaches tail {tol.eps_tail:.1e}",
            details={"alpha": str(state.alpha), "t": state.t, "r": state.r},
        )
    logger.debug(f"fit_cutoff(α={state.alpha}, extra={extra}) -> {cutoff + extra}")
    return cutoff + extra


def csqs_ket(
    state: NormalizedCsqs,
    extra: int = 0,
    tol: Optional[Tolerances] = None,
    cutoff: Optional[int] = None,
) -> FockVector:
    """
    拟合截断处的态，外加 `extra` 层。

    显式 `cutoff` 取代拟合值；在该处截断的态丢失的质量仍须低于 eps_tail，
    `extra` 层保持为空。
    """
    tol = current_tolerances(tol)
    if cutoff is None:
        return csqs_fock(state, fit_cutoff(state, extra, tol), tol)
    ket = csqs_fock(state, cutoff, tol)
    missing = tail_mass(ket)
    if missing > tol.eps_tail:
        raise TailMassError(
            f"cutoff {cutoff} drops mass {missing:.3e} of the state",
            details={"cutoff": cutoff, "tail_mass": missing, "eps_tail": tol.eps_tail},
        )
    if extra:
        ket = FockVector(np.concatenate([ket.amplitudes, np.zeros(extra, dtype=complex)]))
    return ket


def csqs_density(
    state: NormalizedCsqs,
    extra: int = 0,
    tol: Optional[Tolerances] = None,
    cutoff: Optional[int] = None,
) -> DensityOperator:
    return projector(csqs_ket(state, extra, tol, cutoff))


def csqs_oracle_ket(
    state: NormalizedCsqs,
    cutoff: Optional[int] = None,
    tol: Optional[Tolerances] = None,
) -> FockVector:
    """在截断相干向量上用升降算符构造的态"""
    tol = current_tolerances(tol)
    if cutoff is None:
        cutoff = fit_cutoff(state, 1, tol)
    coherent = coherent_fock(state.alpha, cutoff, tol)
    lowered = apply_annihilation(coherent).amplitudes
    raised = apply_creation(coherent, tol).amplitudes
    return fock_from_amplitudes(
        state.n_const * (state.t * lowered + state.r * raised), tol
    )


# --- 矩 ---


def moment_oracle_for(
    state: NormalizedCsqs,
    m: int,
    n: int,
    tol: Optional[Tolerances] = None,
    cutoff: Optional[int] = None,
) -> complex:
    """在留有 m + n 层余量的截断下用升降算符计算 ⟨a†^m a^n⟩"""
    return moment_oracle(csqs_ket(state, m + n, tol, cutoff), m, n, tol)


def moment_closed(
    state: NormalizedCsqs, m: int, n: int, tol: Optional[Tolerances] = None
) -> complex:
    """
    ⟨a†^m a^n⟩ = N² α*^{m-1} α^{n-1} [|α|⁴ + rt{(m+|α|²)α² + (n+|α|²)α*²}
                                        + r²{mn + (m+n+1)|α|²}]

    α ≠ 0 时对所有 m, n ≥ 0 成立；α = 0 交给升降算符基准。
    """
    if m < 0 or n < 0:
        raise UsageError("moment orders must be >= 0", details={"m": m, "n": n})
    if m == 0 and n == 0:
        return 1.0 + 0.0j

    alpha = state.alpha
    if alpha == 0:
        logger.debug(f"moment_closed(m={m}, n={n}) at α=0 uses the oracle")
        return moment_oracle_for(state, m, n, tol)

    t, r = state.t, state.r
    a2 = abs(alpha) ** 2
    conj = alpha.conjugate()
    bracket = (
        a2 * a2
        + r * t * ((m + a2) * alpha * alpha + (n + a2) * conj * conj)
        + r * r * (m * n + (m + n + 1) * a2)
    )
    return complex(state.n_const**2 * conj ** (m - 1) * alpha ** (n - 1) * bracket)


def mean_photon_number(state: NormalizedCsqs) -> float:
    return moment_closed(state, 1, 1).real
