"""
csqs-lab 配置管理

为数值容差与默认值提供唯一的类型安全来源。各配置源的原始数据按优先级合并
（默认值 < 文件 < 环境变量 < 运行时），再由 LabConfig 校验。
"""

import threading
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from .config_models import LabConfig, Tolerances
from .config_sources import (
    BaseConfigSource,
    DictConfigSource,
    EnvironmentConfigSource,
    FileConfigSource,
    deep_merge,
)
from .exceptions import ConfigValidationError


class ConfigManager:
    """
    配置管理器实现

    合并后的原始映射保留在 `raw` 中，供自带模式的调用方（CLI 运行配置）读取
    LabConfig 忽略的键。
    """

    def __init__(
        self,
        config_path: Optional[Path] = None,
        use_environment: bool = True,
        overrides: Optional[Dict[str, Any]] = None,
    ):
        """初始化配置管理器"""
        self.config_path = Path(config_path) if config_path else None
        self._lock = threading.RLock()
        self._sources: List[BaseConfigSource] = []
        if self.config_path is not None:
            self._sources.append(FileConfigSource(self.config_path))
        if use_environment:
            self._sources.append(EnvironmentConfigSource())
        if overrides:
            self._sources.append(DictConfigSource(overrides))
        self.raw: Dict[str, Any] = {}
        self.config: LabConfig = self._load()

    def _load(self) -> LabConfig:
        merged: Dict[str, Any] = {}
        for source in sorted(self._sources, key=lambda s: s.priority.value):
            merged = deep_merge(merged, source.load())
        try:
            config = LabConfig(**merged)
        except ValidationError as e:
            raise ConfigValidationError(
                f"Configuration validation error: {e}",
                code="config_invalid",
                details={"errors": e.errors(include_url=False)},
            ) from e
        self.raw = merged
        return config

    def reload(self) -> LabConfig:
        """重新加载配置"""
        with self._lock:
            self.config = self._load()
            return self.config

    def get_config(self) -> LabConfig:
        """获取当前的类型安全配置对象"""
        with self._lock:
            return self.config

    def file_data(self) -> Dict[str, Any]:
        """仅配置文件中的原始键（不含环境变量与覆盖项）"""
        for source in self._sources:
            if isinstance(source, FileConfigSource):
                return source.load()
        return {}


# --- 全局实例管理 ---

_config_manager: Optional[ConfigManager] = None
_config_lock = threading.Lock()


def get_config_manager(config_path: Optional[Path] = None) -> ConfigManager:
    """
    获取进程级 ConfigManager

    Args:
        config_path: 仅在首次调用时使用；请求不同文件时替换管理器

    Returns:
        共享的 ConfigManager 实例
    """
    global _config_manager

    with _config_lock:
        if _config_manager is None or (
            config_path is not None
            and Path(config_path) != _config_manager.config_path
        ):
            _config_manager = ConfigManager(config_path)
        return _config_manager


def set_config_manager(manager: Optional[ConfigManager]) -> None:
    """设置（传入 None 则清除）进程级管理器"""
    global _config_manager
    with _config_lock:
        _config_manager = manager


def current_config() -> LabConfig:
    return get_config_manager().get_config()


def current_tolerances(tol: Optional[Tolerances] = None) -> Tolerances:
    """显式传入的容差优先，否则使用配置中的容差"""
    return tol if tol is not None else current_config().tolerances
