# /pg_fold/utils/access_monitor.py

import logging
from fractions import Fraction
from typing import Any, Dict

logger = logging.getLogger(__name__)

class AccessMonitor:
    """
    シミュレーション中のメモリアクセスを監視し、統計情報を収集するクラス。
    """
    def __init__(self):
        self.total_reads = 0
        self.total_writes = 0
        self.busy_slots = 0
        self.idle_slots = 0
        self.unit_metrics: Dict[int, Dict[str, int]] = {}
        self.memory_metrics: Dict[int, Dict[str, int]] = {}
        self.phase_metrics: Dict[str, Dict[str, int]] = {}

    def record_access(self, unit: int, mem: int, op: str, phase: str):
        """
        1回のメモリアクセスを記録します。

        Args:
            unit (int): アクセスしたプロセッシングユニット。
            mem (int): アクセス先のメモリ。
            op (str): 'read' または 'write'。
            phase (str): 'point' または 'hyperplane'。
        """
        if op == 'read':
            self.total_reads += 1
        else:
            self.total_writes += 1

        u_metrics = self.unit_metrics.setdefault(unit, {'reads': 0, 'writes': 0})
        m_metrics = self.memory_metrics.setdefault(mem, {'reads': 0, 'writes': 0})
        p_metrics = self.phase_metrics.setdefault(phase, {'reads': 0, 'writes': 0})
        key = 'reads' if op == 'read' else 'writes'
        u_metrics[key] += 1
        m_metrics[key] += 1
        p_metrics[key] += 1

    def record_slots(self, busy: int, idle: int):
        """読み出しスロットの稼働数とアイドル数を加算します。"""
        self.busy_slots += busy
        self.idle_slots += idle
        if idle:
            logger.debug(f"アイドルスロット {idle} 個を記録しました。")

    @property
    def utilization(self) -> Fraction:
        total = self.busy_slots + self.idle_slots
        return Fraction(self.busy_slots, total) if total else Fraction(0)

    def get_summary(self) -> Dict[str, Any]:
        """
        アクセス統計のサマリーを返します。

        Returns:
            dict: ユニット別・メモリ別・フェーズ別の読み書き回数と稼働率（分数は [分子, 分母]）。
        """
        u = self.utilization
        return {
            'overall_statistics': {
                'total_reads': self.total_reads,
                'total_writes': self.total_writes,
                'busy_slots': self.busy_slots,
                'idle_slots': self.idle_slots,
                'utilization': [u.numerator, u.denominator],
            },
            'unit_breakdown': {str(k): v for k, v in sorted(self.unit_metrics.items())},
            'memory_breakdown': {str(k): v for k, v in sorted(self.memory_metrics.items())},
            'phase_breakdown': dict(sorted(self.phase_metrics.items())),
        }
