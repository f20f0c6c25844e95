#!/usr/bin/env python3
"""
电源门控分析工具配置管理模块
"""

import copy
import json
import os
from pathlib import Path
from typing import Dict, Any, Optional

import yaml

from .constants import (
    EnvVars, GatingDefaults, RailDefaults, PowerDefaults, LoggingConstants
)


class Config:
    """配置管理类"""

    # 默认配置
    DEFAULT_CONFIG = {
        'device': {
            'params_file': None,   # None 表示使用随包发布的 45nm 参数
            'library_file': None,  # None 表示使用随包发布的单元库
        },
        'timing': {
            'vth': 0.01,  # 手选的有效阈值电压 (V)，与 alpha=1.17 配对；fit 命令给出极小化误差的拟合值
            'fit': {
                'vth_points': 201,
                'alpha_points': 101,
                'refine_iterations': 60,
            },
        },
        'gating': {
            'ir_fraction': GatingDefaults.IR_FRACTION,
            'alpha_drop': GatingDefaults.ALPHA_DROP,
            'st_length': GatingDefaults.ST_LENGTH,
            'conventional_candidates': list(GatingDefaults.CONVENTIONAL_CANDIDATES),
            'cbstd_candidates': list(GatingDefaults.CBSTD_CANDIDATES),
            'delay_budget': GatingDefaults.DELAY_BUDGET,
            'n_nc': 1,
            'nc_width': GatingDefaults.NC_WIDTH,
            'tunable_unit': GatingDefaults.TUNABLE_UNIT,
            'default_word': GatingDefaults.DEFAULT_WORD,
            'current_scale': 1.0,
            'control_cell': GatingDefaults.CONTROL_CELL,
        },
        'rail': {
            'n_rows': RailDefaults.N_ROWS,
            'r_rail': RailDefaults.R_RAIL,
            'allowed_violations': RailDefaults.ALLOWED_VIOLATIONS,
            'candidates': list(GatingDefaults.CONVENTIONAL_CANDIDATES),
        },
        'power': {
            'freq': PowerDefaults.FREQ,
            'activity': PowerDefaults.ACTIVITY,
            'duty_active': PowerDefaults.DUTY_ACTIVE,
            'st_cap_per_width': PowerDefaults.ST_CAP_PER_WIDTH,
        },
        'logging': {
            'level': LoggingConstants.DEFAULT_LEVEL,
            'format': LoggingConstants.DEFAULT_FORMAT,
            'file': None  # 设置为文件路径以启用文件日志
        },
        'output': {
            'format': 'json'  # 支持 'json', 'csv'
        }
    }

    def __init__(self, config_file: Optional[Path] = None):
        """初始化配置

        Args:
            config_file: 配置文件路径，如果未指定则使用默认配置
        """
        self._config = copy.deepcopy(self.DEFAULT_CONFIG)
        self._config_file = config_file

        if config_file and config_file.exists():
            self.load_config(config_file)

    def load_config(self, config_file: Path):
        """从文件加载配置

        Args:
            config_file: 配置文件路径，支持YAML和JSON格式
        """
        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                if config_file.suffix.lower() in ['.yml', '.yaml']:
                    user_config = yaml.safe_load(f) or {}
                elif config_file.suffix.lower() == '.json':
                    user_config = json.load(f)
                else:
                    raise ValueError(f"不支持的配置文件格式: {config_file.suffix}")

            # 递归合并配置
            self._config = self._merge_configs(self._config, user_config)
            self.validate()

        except Exception as e:
            raise ValueError(f"加载配置文件失败 {config_file}: {e}")

    def validate(self):
        """检查数值配置项的取值范围

        Raises:
            ValueError: 第一个越界的配置项
        """
        checks = [
            ('gating.ir_fraction', lambda v: 0 < v < 1, "必须在 (0, 1) 内"),
            ('gating.alpha_drop', lambda v: 0 < v < 1, "必须在 (0, 1) 内"),
            ('gating.delay_budget', lambda v: v >= 1, "必须不小于 1"),
            ('gating.tunable_unit', lambda v: v > 0, "必须为正"),
            ('gating.nc_width', lambda v: v > 0, "必须为正"),
            ('gating.n_nc', lambda v: v >= 1, "必须至少为 1"),
            ('rail.n_rows', lambda v: v >= 1, "必须至少为 1"),
            ('rail.r_rail', lambda v: v > 0, "必须为正"),
            ('rail.allowed_violations', lambda v: v >= 0, "不能为负"),
            ('power.freq', lambda v: v > 0, "必须为正"),
            ('power.activity', lambda v: 0 <= v <= 1, "必须在 [0, 1] 内"),
            ('power.duty_active', lambda v: 0 <= v <= 1, "必须在 [0, 1] 内"),
        ]
        for key, ok, reason in checks:
            value = self.get(key)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not ok(value):
                raise ValueError(f"配置项 {key}={value!r} {reason}")

        word = str(self.get('gating.default_word'))
        if len(word) != 4 or set(word) - {'0', '1'}:
            raise ValueError(f"配置项 gating.default_word={word!r} 必须是 4 位二进制串")

    def _merge_configs(self, base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """递归合并配置字典"""
        result = copy.deepcopy(base)

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值，支持点分割路径

        Args:
            key: 配置键，支持嵌套路径如 'gating.ir_fraction'
            default: 默认值

        Returns:
            配置值
        """
        keys = key.split('.')
        value = self._config

        try:
            for k in keys:
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key: str, value: Any):
        """设置配置值

        Args:
            key: 配置键，支持嵌套路径
            value: 配置值
        """
        keys = key.split('.')
        config = self._config

        # 导航到父级字典
        for k in keys[:-1]:
            if k not in config:
                config[k] = {}
            config = config[k]

        config[keys[-1]] = value

    def save_config(self, config_file: Optional[Path] = None):
        """保存配置到文件

        Args:
            config_file: 配置文件路径，如果未指定则使用初始化时的文件
        """
        file_path = config_file or self._config_file
        if not file_path:
            raise ValueError("未指定配置文件路径")

        file_path.parent.mkdir(parents=True, exist_ok=True)

        with open(file_path, 'w', encoding='utf-8') as f:
            if file_path.suffix.lower() in ['.yml', '.yaml']:
                yaml.dump(self._config, f, default_flow_style=False,
                          allow_unicode=True, indent=2)
            elif file_path.suffix.lower() == '.json':
                json.dump(self._config, f, ensure_ascii=False, indent=2)
            else:
                raise ValueError(f"不支持的配置文件格式: {file_path.suffix}")

    @property
    def config(self) -> Dict[str, Any]:
        """获取完整配置字典"""
        return copy.deepcopy(self._config)

    # 便捷方法
    def get_device_config(self) -> Dict[str, Any]:
        """获取器件文件配置"""
        return self.get('device', {})

    def get_timing_config(self) -> Dict[str, Any]:
        """获取时序配置"""
        return self.get('timing', {})

    def get_gating_config(self) -> Dict[str, Any]:
        """获取门控配置"""
        return self.get('gating', {})

    def get_rail_config(self) -> Dict[str, Any]:
        """获取虚拟地轨配置"""
        return self.get('rail', {})

    def get_power_config(self) -> Dict[str, Any]:
        """获取功耗配置"""
        return self.get('power', {})

    def get_logging_config(self) -> Dict[str, Any]:
        """获取日志配置"""
        return self.get('logging', {})

    def get_output_config(self) -> Dict[str, Any]:
        """获取输出配置"""
        return self.get('output', {})


# 全局配置实例
_global_config: Optional[Config] = None

def get_config() -> Config:
    """获取全局配置实例

    首次调用时若设置了 PGLAB_CONFIG 环境变量则从该文件加载。
    """
    global _global_config
    if _global_config is None:
        env_file = os.environ.get(EnvVars.CONFIG_FILE)
        _global_config = Config(Path(env_file)) if env_file else Config()
    return _global_config

def set_config(config: Config):
    """设置全局配置实例"""
    global _global_config
    _global_config = config

def load_config_from_file(config_file: Path) -> Config:
    """从文件加载配置并设置为全局配置"""
    config = Config(config_file)
    set_config(config)
    return config
