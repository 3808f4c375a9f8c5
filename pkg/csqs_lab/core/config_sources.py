"""
配置源

提供 ConfigManager 合并的各类配置源:
- 文件配置源（YAML、JSON、TOML，按后缀选择格式）
- 环境变量配置源（CSQS_LAB_ 前缀，嵌套键以 "__" 分隔）
- 字典配置源（程序化覆盖，供测试与 CLI 使用）
"""

import json
import logging
import os
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import toml
import yaml

from .exceptions import ConfigSourceError

logger = logging.getLogger(__name__)


class ConfigPriority(Enum):
    """配置源优先级，数值高者覆盖数值低者"""

    DEFAULT = 0
    FILE = 100
    ENVIRONMENT = 200
    RUNTIME = 300


class BaseConfigSource:
    """配置源基类"""

    def __init__(self, priority: ConfigPriority, name: str):
        self._priority = priority
        self._name = name
        self._last_modified: Optional[datetime] = None
        self._is_loaded = False

    @property
    def priority(self) -> ConfigPriority:
        return self._priority

    @property
    def name(self) -> str:
        return self._name

    def is_loaded(self) -> bool:
        return self._is_loaded

    def get_last_modified(self) -> Optional[datetime]:
        return self._last_modified

    def load(self) -> Dict[str, Any]:
        raise NotImplementedError


class DictConfigSource(BaseConfigSource):
    """字典配置源 - 用于测试和运行时覆盖"""

    def __init__(
        self, data: Dict[str, Any], priority: ConfigPriority = ConfigPriority.RUNTIME
    ):
        super().__init__(priority, f"dict:{id(data)}")
        self._data = dict(data)
        self._is_loaded = True
        self._last_modified = datetime.now()

    def load(self) -> Dict[str, Any]:
        return dict(self._data)


class FileConfigSource(BaseConfigSource):
    """文件配置源 - 支持 YAML、JSON 和 TOML"""

    SUPPORTED_FORMATS = {
        ".yaml": "yaml",
        ".yml": "yaml",
        ".json": "json",
        ".toml": "toml",
    }

    def __init__(
        self,
        file_path: Path,
        priority: ConfigPriority = ConfigPriority.FILE,
        encoding: str = "utf-8",
    ):
        super().__init__(priority, f"file:{file_path}")
        self.file_path = Path(file_path)
        self.encoding = encoding
        self._format = self._detect_format()

    def _detect_format(self) -> str:
        suffix = self.file_path.suffix.lower()
        if suffix not in self.SUPPORTED_FORMATS:
            raise ConfigSourceError(
                f"Unsupported config format: {self.file_path.name}",
                code="config_format",
                details={"path": str(self.file_path)},
            )
        return self.SUPPORTED_FORMATS[suffix]

    def load(self) -> Dict[str, Any]:
        """加载配置文件；文件缺失视为错误而非空配置"""
        if not self.file_path.exists():
            raise ConfigSourceError(
                f"Config file not found: {self.file_path}",
                code="config_missing",
                details={"path": str(self.file_path)},
            )

        try:
            with open(self.file_path, encoding=self.encoding) as f:
                if self._format == "yaml":
                    data = yaml.safe_load(f) or {}
                elif self._format == "json":
                    data = json.load(f)
                else:
                    data = toml.load(f)
        except (yaml.YAMLError, json.JSONDecodeError, toml.TomlDecodeError) as e:
            raise ConfigSourceError(
                f"Cannot parse {self.file_path}: {e}",
                code="config_parse",
                details={"path": str(self.file_path)},
            ) from e

        if not isinstance(data, dict):
            raise ConfigSourceError(
                f"Config root must be a mapping: {self.file_path}",
                code="config_parse",
                details={"path": str(self.file_path)},
            )

        self._last_modified = datetime.fromtimestamp(self.file_path.stat().st_mtime)
        self._is_loaded = True
        logger.debug(f"Loaded config from {self.file_path}: {len(data)} keys")
        return data


class EnvironmentConfigSource(BaseConfigSource):
    """环境变量配置源"""

    def __init__(
        self,
        prefix: str = "CSQS_LAB_",
        priority: ConfigPriority = ConfigPriority.ENVIRONMENT,
        separator: str = "__",
    ):
        super().__init__(priority, f"env:{prefix}")
        self.prefix = prefix
        self.separator = separator

    def load(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        prefix_len = len(self.prefix)

        for key, value in os.environ.items():
            if not key.startswith(self.prefix):
                continue
            config_key = key[prefix_len:].lower()
            path = [part for part in config_key.split(self.separator) if part]
            if path:
                self._set_nested_value(data, path, self._parse_env_value(value))

        self._is_loaded = True
        self._last_modified = datetime.now()
        logger.debug(
            f"Loaded {len(data)} environment keys with prefix '{self.prefix}'"
        )
        return data

    def _parse_env_value(self, value: str) -> Any:
        """尽力解析标量，结果交由 pydantic 校验"""
        lowered = value.strip().lower()
        if lowered in ("true", "yes", "on"):
            return True
        if lowered in ("false", "no", "off"):
            return False
        for cast in (int, float):
            try:
                return cast(value)
            except ValueError:
                continue
        return value

    def _set_nested_value(self, data: Dict[str, Any], path: list, value: Any):
        current = data
        for part in path[:-1]:
            current = current.setdefault(part, {})
        current[path[-1]] = value


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """将 override 合并进 base 的副本，嵌套字典逐键合并"""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
