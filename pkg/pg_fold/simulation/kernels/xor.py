# /pg_fold/simulation/kernels/xor.py

import numpy as np

from ...config import settings
from ..enums import UpdateRule
from .base import Kernel


class XorKernel(Kernel):
    """w ビット語の排他的論理和。"""

    def __init__(self, update: UpdateRule = UpdateRule.ASSIGN, width: int = None):
        super().__init__(update)
        self.width = width or settings.XOR_WORD_WIDTH
        self.mask = (1 << self.width) - 1

    @property
    def identity(self) -> int:
        return 0

    def combine(self, a: int, b: int) -> int:
        return (a ^ b) & self.mask

    def random_word(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.mask, dtype=np.uint64, endpoint=True))
