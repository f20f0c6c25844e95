#!/usr/bin/env python3
"""
器件参数文件读写

格式为逐行 ``key=value``，``#`` 起始注释，未知键报错。
"""

import logging
import os
from pathlib import Path
from typing import Dict, Optional

from .constants import DEFAULT_PARAMS_FILE, DeviceDefaults, EnvVars
from ..models.base import DeviceParams, DomainError, ParamsFileError

logger = logging.getLogger(__name__)


def parse_device_params(text: str) -> DeviceParams:
    """解析器件参数文本

    Args:
        text: 参数文件内容

    Returns:
        DeviceParams: 器件参数

    Raises:
        ParamsFileError: 未知键、重复键、格式错误或参数不合法
    """
    values: Dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ParamsFileError(f"缺少 '=': {raw.strip()}", lineno)

        key, value = (part.strip() for part in line.split('=', 1))
        if key not in DeviceDefaults.PARAM_KEYS:
            raise ParamsFileError(f"未知参数: {key}", lineno)
        if key in values:
            raise ParamsFileError(f"重复参数: {key}", lineno)
        try:
            values[key] = float(value)
        except ValueError:
            raise ParamsFileError(f"参数 {key} 的值不是数字: {value}", lineno)

    missing = [k for k in ('mu0_cox', 'vth0') if k not in values]
    if missing:
        raise ParamsFileError(f"缺少必需参数: {', '.join(missing)}")

    try:
        return DeviceParams(**values)
    except DomainError as e:
        raise ParamsFileError(str(e))


def format_device_params(p: DeviceParams) -> str:
    """输出规范形式的参数文本，按固定键序"""
    lines = ["# pglab device parameters"]
    lines.extend(f"{key}={getattr(p, key)!r}" for key in DeviceDefaults.PARAM_KEYS)
    return "\n".join(lines) + "\n"


def resolve_params_path(cli_path: Optional[str] = None,
                        config_path: Optional[str] = None) -> Path:
    """确定参数文件路径: 命令行 > PGLAB_PARAMS > 配置文件 > 随包默认"""
    for candidate in (cli_path, os.environ.get(EnvVars.PARAMS_FILE), config_path):
        if candidate:
            return Path(candidate)
    return DEFAULT_PARAMS_FILE


def load_device_params(path: Optional[Path] = None) -> DeviceParams:
    """从文件加载器件参数，未指定时使用随包发布的 45nm 参数"""
    path = Path(path) if path else DEFAULT_PARAMS_FILE
    logger.debug(f"加载器件参数: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return parse_device_params(f.read())
