# /pg_fold/simulation/kernels/base.py
# タイトル: Abstract Base Class for Vertex Kernels
# 役割: 頂点計算（可換・結合的な縮約と辺の更新規則）の基底クラスを定義する。

import logging
from abc import ABC, abstractmethod
from functools import reduce
from typing import Iterable

import numpy as np

from ..enums import UpdateRule

logger = logging.getLogger(__name__)


class Kernel(ABC):
    """
    全ての頂点カーネルの抽象基底クラス（ABC）
    縮約 combine は可換かつ結合的でなければならない。
    """

    def __init__(self, update: UpdateRule = UpdateRule.ASSIGN):
        self.kernel_name = self.__class__.__name__.replace("Kernel", "").lower()
        self.update_rule = UpdateRule(update)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(update={self.update_rule.value})"

    @property
    @abstractmethod
    def identity(self) -> int:
        """縮約の単位元。"""
        pass

    @abstractmethod
    def combine(self, a: int, b: int) -> int:
        pass

    @abstractmethod
    def random_word(self, rng: np.random.Generator) -> int:
        """初期状態用のランダムな語。"""
        pass

    def reduce(self, values: Iterable[int]) -> int:
        return reduce(self.combine, values, self.identity)

    def update(self, reduced: int, old: int) -> int:
        if self.update_rule == UpdateRule.ASSIGN:
            return reduced
        return self.combine(old, reduced)
