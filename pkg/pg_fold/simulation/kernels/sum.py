# /pg_fold/simulation/kernels/sum.py

import numpy as np

from .base import Kernel

# 初期値の上限。和そのものはPythonの多倍長整数で正確に計算する。
_INIT_BOUND = 1 << 16


class SumKernel(Kernel):
    """正確な整数和（オーバーフローなし）。"""

    @property
    def identity(self) -> int:
        return 0

    def combine(self, a: int, b: int) -> int:
        return a + b

    def random_word(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, _INIT_BOUND))
