"""
シミュレーションで使用するEnum定義
"""
from enum import Enum

class Phase(Enum):
    """二部グラフ計算の2つのフェーズ"""
    POINT = "point"            # フェーズ1: 点側の制約評価
    HYPERPLANE = "hyperplane"  # フェーズ2: 超平面側の制約評価

class AccessOp(Enum):
    READ = "read"
    WRITE = "write"

class UpdateRule(Enum):
    """辺の更新規則 new_edge = f(reduced, old_edge)"""
    ASSIGN = "assign"
    ADD = "add"
