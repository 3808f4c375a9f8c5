"""
csqs-lab 异常定义

库内抛出的所有异常都继承自 CsqsLabError，带有简短的机器码和包含相关数值的
details 字典。CLI 按下列类映射退出码。
"""

from typing import Any, Dict, Optional


class CsqsLabError(Exception):
    """csqs-lab 基础异常类"""

    exit_code: int = 1

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = details or {}


# 配置相关异常
class ConfigError(CsqsLabError):
    """配置错误基类"""

    exit_code = 2


class ConfigValidationError(ConfigError):
    """配置验证错误"""

    pass


class ConfigSourceError(ConfigError):
    """配置源错误"""

    pass


class UsageError(CsqsLabError):
    """调用方提供的参数无效"""

    exit_code = 2


# 数值域相关异常
class NumericalDomainError(CsqsLabError):
    """数值层错误基类"""

    exit_code = 3


class TailMassError(NumericalDomainError):
    """Fock 截断丢弃的振幅质量超过尾部容差"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="tail_mass", details=details)


class DegenerateStateError(NumericalDomainError):
    """叠加态被湮灭或无法归一化"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="degenerate_state", details=details)


class DomainError(NumericalDomainError):
    """公式在其定义域之外求值"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="domain", details=details)


class UnsupportedDomainError(DomainError):
    """公式仅对受限参数集成立（例如实数 α）"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details=details)
        self.code = "unsupported_domain"


class InadequateGridError(NumericalDomainError):
    """相空间网格未能覆盖场的归一化"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="inadequate_grid", details=details)


class CovarianceValidityError(NumericalDomainError):
    """协方差矩阵违反不确定性下界"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="covariance_validity", details=details)


class ComparisonFailure(CsqsLabError):
    """闭式解与数值基准的差异超出容差"""

    exit_code = 4

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code="comparison_failure", details=details)
