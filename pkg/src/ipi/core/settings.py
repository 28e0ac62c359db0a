"""
ipi 配置管理模块
================

本模块是整个库读取配置的唯一入口，实现配置的优先级加载逻辑
(优先级从高到低)：
1. 显式传入的关键字参数 (命令行覆盖)
2. 以 IPI_ 为前缀的环境变量，嵌套字段使用 "__" 分隔
   (例如 IPI_SOLVER__TOL=1e-6, IPI_THREADS=4)
3. .env 文件
4. config/<env>.yaml，<env> 取自 IPI_ENV (默认 development)
5. config/default.yaml
6. 字段默认值

使用 pydantic-settings 提供类型安全的配置访问。
"""

import copy
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Type

import yaml
from pydantic import BaseModel, Field
from pydantic.fields import FieldInfo
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

OuterMethodName = Literal["vi", "pi", "opi", "ipi"]
InnerMethodName = Literal["richardson", "jacobi", "gs", "sor", "sd", "minres", "gmres"]

DEFAULT_CONFIG_DIR = Path(__file__).parent.parent.parent.parent / "config"


class AppSettings(BaseModel):
    """应用设置"""
    name: str = "ipi-solver"
    version: str = "1.0.0"
    log_level: str = "INFO"
    logging_config: str = "logging_config.yaml"


class SolverSettings(BaseModel):
    """求解器默认参数"""
    method: OuterMethodName = "ipi"
    inner: InnerMethodName = "gmres"
    nu: float = Field(1.0, gt=0)
    omega: float = Field(1.0, gt=0, lt=2)
    restart: Optional[int] = Field(None, ge=1)
    alpha: float = Field(0.1, gt=0, lt=1)
    forcing: Literal["constant", "geometric"] = "constant"
    forcing_decay: float = Field(0.5, gt=0, lt=1)
    forcing_min: float = Field(1e-12, gt=0, lt=1)
    opi_w: int = Field(5, ge=1)
    tol: float = Field(1e-8, gt=0)
    max_outer_iters: int = Field(10_000, ge=1)
    max_inner_iters: int = Field(500, ge=1)
    time_budget_s: Optional[float] = Field(500.0, gt=0)
    dense_fallback_below: int = Field(64, ge=0)
    reference: Literal["none", "pi"] = "none"


class AnalysisSettings(BaseModel):
    """结构分析设置"""
    classify_policy_cap: int = Field(100_000, ge=1)
    modulus_tol: float = 1e-8
    krylov_rank_tol: float = 1e-12


class IOSettings(BaseModel):
    """文件读写设置"""
    max_json_nonzeros: int = Field(5_000_000, ge=1)
    output_dir: str = "results"


def _default_threads() -> int:
    return os.cpu_count() or 1


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """递归合并两个字典，override 中的值优先"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_yaml_layers(config_dir: Path, env: str) -> Dict[str, Any]:
    """按 default.yaml -> <env>.yaml 的顺序加载并深度合并 YAML 配置"""
    data: Dict[str, Any] = {}
    for name in ("default.yaml", f"{env}.yaml"):
        path = config_dir / name
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                data = _deep_merge(data, yaml.safe_load(f) or {})
    return data


class YamlLayeredSettingsSource(PydanticBaseSettingsSource):
    """从分层 YAML 文件读取配置的 settings source"""

    def __init__(self, settings_cls: Type[BaseSettings]):
        super().__init__(settings_cls)
        config_dir = Path(os.environ.get("IPI_CONFIG_DIR", DEFAULT_CONFIG_DIR))
        env = os.environ.get("IPI_ENV", "development")
        self._data = load_yaml_layers(config_dir, env)

    def get_field_value(
        self, field: FieldInfo, field_name: str
    ) -> Tuple[Any, str, bool]:
        return self._data.get(field_name), field_name, False

    def __call__(self) -> Dict[str, Any]:
        return {
            key: value
            for key, value in self._data.items()
            if key in self.settings_cls.model_fields and value is not None
        }


class Settings(BaseSettings):
    """
    ipi 主配置类

    嵌套的配置段分别对应应用信息、求解器默认参数、结构分析、文件读写，
    以及并行工作线程上限 (环境变量 IPI_THREADS)。
    """

    app: AppSettings = Field(default_factory=AppSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    analysis: AnalysisSettings = Field(default_factory=AnalysisSettings)
    io: IOSettings = Field(default_factory=IOSettings)
    threads: int = Field(default_factory=_default_threads, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="IPI_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            YamlLayeredSettingsSource(settings_cls),
        )

    def with_overrides(self, overrides: Dict[str, Any]) -> "Settings":
        """返回深度合并了 overrides 的新配置实例"""
        merged = _deep_merge(self.model_dump(), overrides)
        return Settings(**merged)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """获取全局设置实例"""
    return Settings()


__all__ = [
    "Settings",
    "AppSettings",
    "SolverSettings",
    "AnalysisSettings",
    "IOSettings",
    "OuterMethodName",
    "InnerMethodName",
    "get_settings",
    "load_yaml_layers",
]
