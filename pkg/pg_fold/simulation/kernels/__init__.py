# /pg_fold/simulation/kernels/__init__.py
"""
頂点カーネルの動的ロードとファクトリー機能
"""
import importlib
import inspect
import logging
import os
import pkgutil
from typing import Dict, List, Type, Union

from ..enums import UpdateRule
from .base import Kernel

logger = logging.getLogger(__name__)

# カーネルを格納するグローバル辞書
kernels: Dict[str, Type[Kernel]] = {}
_initialized = False

def _initialize_kernels():
    """カーネルモジュールを動的にインポートして登録する"""
    global _initialized
    if _initialized:
        return

    package_path = os.path.dirname(__file__)
    for _, name, _ in pkgutil.iter_modules([package_path]):
        if name == 'base':
            continue
        module = importlib.import_module(f".{name}", package=__name__)
        for _, obj in inspect.getmembers(module, inspect.isclass):
            if issubclass(obj, Kernel) and obj is not Kernel:
                kernels[name.lower()] = obj
                logger.debug(f"カーネル '{name}' を登録: {obj.__name__}")

    _initialized = True
    logger.debug(f"カーネル: {len(kernels)} 個")


def list_kernels() -> List[str]:
    _initialize_kernels()
    return sorted(kernels.keys())


def get_kernel(name: str, update: Union[str, UpdateRule] = UpdateRule.ASSIGN, **kwargs) -> Kernel:
    """
    指定された名前のカーネルのインスタンスを取得する。
    name は 'xor' / 'sum'、または 'xor-add' のように更新規則を付けた形式を受け付ける。
    """
    _initialize_kernels()
    if '-' in name:
        name, update = name.split('-', 1)
    if name not in kernels:
        raise ValueError(f"カーネル '{name}' が見つかりません。利用可能: {list_kernels()}")
    try:
        rule = UpdateRule(update)
    except ValueError:
        raise ValueError(
            f"更新規則 '{update}' は不正です。利用可能: {[r.value for r in UpdateRule]}"
        ) from None
    return kernels[name](rule, **kwargs)


__all__ = ["Kernel", "get_kernel", "list_kernels"]
