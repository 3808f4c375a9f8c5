"""
截断 Fock 空间线性代数

态、升降算符、50:50 分束器、偏迹、振幅阻尼信道以及位移矩阵元。本模块与包内
其他地方的闭式表达式互相独立，作为它们的暴力数值基准。

截断策略: 解析构造从不重新归一化，而是计算丢弃的质量 1 - Σ|c_n|²，
超过 eps_tail 时抛出 TailMassError。阶乘与二项式系数统一经由 gammaln 计算。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import eval_genlaguerre, gammaln
from scipy.stats import poisson

from .config import current_tolerances
from .config_models import Tolerances
from .exceptions import TailMassError, UsageError

logger = logging.getLogger(__name__)


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FockVector:
    """数态 |0⟩..|D⟩ 上的振幅 c_0..c_D"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.ndim != 1 or amplitudes.size < 2:
            raise UsageError(
                "FockVector needs a 1-D amplitude array with cutoff >= 1",
                details={"shape": list(amplitudes.shape)},
            )
        if not np.all(np.isfinite(amplitudes)):
            raise UsageError("FockVector amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class DensityOperator:
    """数态基下的 (D+1)×(D+1) 厄米矩阵 ρ"""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 2:
            raise UsageError(
                "DensityOperator needs a square matrix with cutoff >= 1",
                details={"shape": list(matrix.shape)},
            )
        if not np.all(np.isfinite(matrix)):
            raise UsageError("DensityOperator entries must be finite")
        # 构造即厄米
        matrix = 0.5 * (matrix + matrix.conj().T)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class TwoModeVector:
    """|j, k⟩ 的振幅 w[j, k]，其中 j + k ≤ D"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes)
        if amplitudes.ndim != 2 or amplitudes.shape[0] != amplitudes.shape[1]:
            raise UsageError(
                "TwoModeVector needs a square amplitude array",
                details={"shape": list(amplitudes.shape)},
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def cutoffs(self) -> tuple[int, int]:
        d = self.amplitudes.shape[0] - 1
        return d, d

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


# --- 构造 ---


def tail_mass(v: FockVector) -> float:
    """本应归一的向量所缺失的振幅质量"""
    return 1.0 - v.norm_squared


def _check_tail(v: FockVector, eps_tail: float, what: str) -> FockVector:
    missing = tail_mass(v)
    if missing > eps_tail:
        raise TailMassError(
            f"cutoff {v.cutoff} too small for {what}: tail mass {missing:.3e} > {eps_tail:.1e}",
            details={"cutoff": v.cutoff, "tail_mass": missing, "eps_tail": eps_tail},
        )
    return v


def number_state(n: int, cutoff: int) -> FockVector:
    if not 0 <= n <= cutoff:
        raise UsageError(
            f"number state |{n}⟩ outside cutoff {cutoff}",
            details={"n": n, "cutoff": cutoff},
        )
    amplitudes = np.zeros(cutoff + 1, dtype=np.complex128)
    amplitudes[n] = 1.0
    return FockVector(amplitudes)


def fock_from_amplitudes(
    amplitudes, tol: Optional[Tolerances] = None
) -> FockVector:
    """包装本应归一的态的振幅"""
    tol = current_tolerances(tol)
    v = FockVector(np.asarray(amplitudes))
    excess = v.norm_squared - 1.0
    if excess > tol.eps_tail:
        raise UsageError(
            f"amplitudes have squared norm {v.norm_squared:.15g} > 1",
            details={"norm_squared": v.norm_squared},
        )
    return _check_tail(v, tol.eps_tail, "supplied amplitudes")


def choose_cutoff(alpha: complex, extra_excitations: int, eps_tail: float) -> int:
    """
    Poisson(|α|²) 在 D 之后的尾部低于 eps_tail 的最小 D，再加上
    extra_excitations 层余量。
    """
    if eps_tail <= 0:
        raise UsageError("eps_tail must be positive", details={"eps_tail": eps_tail})
    if extra_excitations < 0:
        raise UsageError(
            "extra_excitations must be >= 0",
            details={"extra_excitations": extra_excitations},
        )

    mu = abs(complex(alpha)) ** 2
    base = 0
    if mu > 0:
        while poisson.sf(base, mu) >= eps_tail:
            base += 1
    cutoff = max(base + extra_excitations, 1)
    logger.debug(f"choose_cutoff(|α|²={mu:.6g}, extra={extra_excitations}) -> {cutoff}")
    return cutoff


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """相干态原始振幅 c_0..c_cutoff，不做尾部检查"""
    alpha = complex(alpha)
    if cutoff < 0:
        raise UsageError("cutoff must be >= 0", details={"cutoff": cutoff})
    amplitudes = np.zeros(cutoff + 1, dtype=np.complex128)
    if alpha == 0:
        amplitudes[0] = 1.0
        return amplitudes
    n = np.arange(cutoff + 1)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)


def coherent_fock(
    alpha: complex, cutoff: int, tol: Optional[Tolerances] = None
) -> FockVector:
    """截断于 cutoff 的相干态 e^{-|α|²/2} α^n / √(n!)"""
    tol = current_tolerances(tol)
    if cutoff < 1:
        raise UsageError("cutoff must be >= 1", details={"cutoff": cutoff})
    amplitudes = coherent_amplitudes(alpha, cutoff)
    return _check_tail(FockVector(amplitudes), tol.eps_tail, f"coherent state α={alpha}")


def projector(v: FockVector) -> DensityOperator:
    return DensityOperator(np.outer(v.amplitudes, v.amplitudes.conj()))


# --- 升降算符 ---


def apply_annihilation(v: FockVector) -> FockVector:
    """a|v⟩: out_n = √(n+1) v_{n+1}，最高分量置零"""
    out = np.zeros_like(v.amplitudes)
    out[:-1] = np.sqrt(np.arange(1, v.cutoff + 1)) * v.amplitudes[1:]
    return FockVector(out)


def apply_creation(v: FockVector, tol: Optional[Tolerances] = None) -> FockVector:
    """a†|v⟩: out_{n+1} = √(n+1) v_n，要求最高层（几乎）为空"""
    tol = current_tolerances(tol)
    top = abs(v.amplitudes[-1]) ** 2
    if top > tol.eps_tail:
        raise TailMassError(
            f"no headroom for a†: top level {v.cutoff} holds mass {top:.3e}",
            details={"cutoff": v.cutoff, "top_mass": top, "eps_tail": tol.eps_tail},
        )
    out = np.zeros_like(v.amplitudes)
    out[1:] = np.sqrt(np.arange(1, v.cutoff + 1)) * v.amplitudes[:-1]
    return FockVector(out)


def annihilation_matrix(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(
        np.complex128
    )


def creation_matrix(cutoff: int) -> np.ndarray:
    return annihilation_matrix(cutoff).T.copy()


def number_matrix(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff + 1, dtype=float)).astype(np.complex128)


def moment_oracle(
    v: FockVector, m: int, n: int, tol: Optional[Tolerances] = None
) -> complex:
    """
    ⟨a†^m a^n⟩ = ⟨a^m v | a^n v⟩，由重复湮灭得到。

    最高 m 层必须（数值上）为空，与直接作用 m 个产生算符所需的余量相同。
    """
    tol = current_tolerances(tol)
    if m < 0 or n < 0:
        raise UsageError("moment orders must be >= 0", details={"m": m, "n": n})
    if m > 0:
        top = float(np.sum(np.abs(v.amplitudes[-m:]) ** 2))
        if top > tol.eps_tail:
            raise TailMassError(
                f"no headroom for {m} creations: top levels hold mass {top:.3e}",
                details={"cutoff": v.cutoff, "m": m, "top_mass": top},
            )

    left = v
    for _ in range(m):
        left = apply_annihilation(left)
    right = v
    for _ in range(n):
        right = apply_annihilation(right)
    return complex(np.vdot(left.amplitudes, right.amplitudes))


def expectation(rho: DensityOperator, operator: np.ndarray) -> complex:
    return complex(np.trace(rho.matrix @ operator))


# --- 双模层 ---


def beam_splitter_50_50(v: FockVector) -> TwoModeVector:
    """
    与真空混合: |n,0⟩ ↦ 2^{-n/2} Σ_j √C(n,j) |j, n−j⟩

    输出位于 j + k ≤ D 上，截断不会丢失振幅。
    """
    d = v.cutoff
    j, k = np.indices((d + 1, d + 1))
    total = j + k
    inside = total <= d
    clipped = np.where(inside, total, 0)
    log_coeff = 0.5 * (
        gammaln(clipped + 1) - gammaln(j + 1) - gammaln(np.where(inside, k, 0) + 1)
    ) - 0.5 * clipped * np.log(2.0)
    amplitudes = np.where(inside, v.amplitudes[clipped] * np.exp(log_coeff), 0.0)
    return TwoModeVector(amplitudes)


def partial_trace_first(w: TwoModeVector) -> DensityOperator:
    """ρ_B[k, l] = Σ_j w[j, k] conj(w[j, l])."""
    amplitudes = w.amplitudes
    return DensityOperator(amplitudes.T @ amplitudes.conj())


def purity(rho: DensityOperator) -> float:
    """厄米 ρ 的 Tr ρ² = Σ_{mn} |ρ_{mn}|²"""
    return float(np.sum(np.abs(rho.matrix) ** 2))


def validate_density(
    rho: DensityOperator, tol: Optional[Tolerances] = None
) -> DensityOperator:
    """检查迹的容许窗口与数值半正定性"""
    tol = current_tolerances(tol)
    trace = rho.trace
    if trace < 1.0 - tol.eps_tail or trace > 1.0 + tol.eps_tail:
        raise TailMassError(
            f"density trace {trace:.15g} outside [1 - eps_tail, 1]",
            details={"trace": trace, "eps_tail": tol.eps_tail},
        )
    smallest = float(np.linalg.eigvalsh(rho.matrix)[0])
    if smallest < -tol.eps_psd:
        raise TailMassError(
            f"density operator has eigenvalue {smallest:.3e} < -eps_psd",
            details={"min_eigenvalue": smallest, "eps_psd": tol.eps_psd},
        )
    return rho


# --- 信道与位移 ---


def amplitude_damping_kraus(rho: DensityOperator, kappa_t: float) -> DensityOperator:
    """
    光子损耗 ρ ↦ Σ_k K_k ρ K_k†，透射率 η = e^{-2κt}:
    K_k = Σ_n √C(n,k) η^{(n-k)/2} (1-η)^{k/2} |n-k⟩⟨n|.
    """
    if kappa_t < 0:
        raise UsageError("kappa_t must be >= 0", details={"kappa_t": kappa_t})
    if kappa_t == 0:
        return rho

    d = rho.cutoff
    sqrt_eta = np.exp(-kappa_t)
    sqrt_loss = np.sqrt(-np.expm1(-2.0 * kappa_t))
    out = np.zeros_like(rho.matrix)
    for k in range(d + 1):
        n = np.arange(k, d + 1)
        coeff = (
            np.exp(0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))
            * sqrt_eta ** (n - k)
            * sqrt_loss**k
        )
        kraus = np.zeros((d + 1, d + 1), dtype=np.complex128)
        kraus[n - k, n] = coeff
        out += kraus @ rho.matrix @ kraus.conj().T
    return DensityOperator(out)


def displacement_matrix(beta: complex, cutoff: int) -> np.ndarray:
    """
    ⟨n|D(β)|m⟩，由广义 Laguerre 闭式给出:
      n ≥ m: √(m!/n!) β^{n-m} e^{-|β|²/2} L_m^{(n-m)}(|β|²)
      n < m: √(n!/m!) (-β*)^{m-n} e^{-|β|²/2} L_n^{(m-n)}(|β|²)
    """
    beta = complex(beta)
    if beta == 0:
        return np.eye(cutoff + 1, dtype=np.complex128)

    x = abs(beta) ** 2
    n, m = np.indices((cutoff + 1, cutoff + 1))
    low = np.minimum(n, m)
    diff = np.abs(n - m)
    log_mag = (
        0.5 * (gammaln(low + 1) - gammaln(low + diff + 1))
        + diff * np.log(abs(beta))
        - 0.5 * x
    )
    unit = beta / abs(beta)
    phase = np.where(n >= m, unit**diff, (-unit.conjugate()) ** diff)
    laguerre = eval_genlaguerre(low, diff, x)
    return np.exp(log_mag) * phase * laguerre
