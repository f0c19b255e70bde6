"""
シミュレーションの状態とアクセス履歴の追跡
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..utils.access_monitor import AccessMonitor
from ..utils.helper_functions import write_csv_rows
from .enums import AccessOp, Phase


@dataclass
class EdgeState:
    """辺の値（接続グラフの辺番号順）と反復回数。"""
    values: List[int]
    iteration: int = 0

    def copy(self) -> 'EdgeState':
        return EdgeState(list(self.values), self.iteration)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeState):
            return NotImplemented
        return self.values == other.values and self.iteration == other.iteration

    def mismatches(self, other: 'EdgeState') -> List[int]:
        return [i for i, (a, b) in enumerate(zip(self.values, other.values)) if a != b]

    @classmethod
    def filled(cls, num_edges: int, value: int) -> 'EdgeState':
        return cls([value] * num_edges)

    @classmethod
    def random(cls, num_edges: int, kernel, seed: int) -> 'EdgeState':
        rng = np.random.default_rng(seed)
        return cls([kernel.random_word(rng) for _ in range(num_edges)])


@dataclass(frozen=True)
class TraceRecord:
    slot: int
    unit: int
    mem: int
    addr: int
    op: AccessOp
    edge: Tuple[int, int]
    phase: Phase = Phase.POINT
    iteration: int = 0

    def row(self) -> Tuple[int, int, int, int, str, int, int]:
        return (self.slot, self.unit, self.mem, self.addr, self.op.value, self.edge[0], self.edge[1])


TRACE_COLUMNS = ('slot', 'unit', 'mem', 'addr', 'op', 'edge_point', 'edge_hyperplane')


@dataclass
class SimTrace:
    """アクセス記録・衝突・カバレッジ・アイドル数・最終状態。記録は要求時のみ保持する。"""
    seed: Optional[int] = None
    keep_records: bool = False
    records: List[TraceRecord] = field(default_factory=list)
    conflicts: List[Dict[str, Any]] = field(default_factory=list)
    monitor: AccessMonitor = field(default_factory=AccessMonitor)
    final_state: Optional[EdgeState] = None

    def record(self, rec: TraceRecord):
        self.monitor.record_access(rec.unit, rec.mem, rec.op.value, rec.phase.value)
        if self.keep_records:
            self.records.append(rec)

    @property
    def conflict_free(self) -> bool:
        return not self.conflicts

    @property
    def idle_slots(self) -> int:
        return self.monitor.idle_slots

    def coverage(self) -> Dict[str, Any]:
        return self.monitor.get_summary()

    def write_csv(self, path: Union[str, Path]):
        rows = (rec.row() for rec in sorted(self.records, key=lambda r: (r.slot, r.unit, r.op.value)))
        write_csv_rows(path, TRACE_COLUMNS, rows)

    def summary(self) -> Dict[str, Any]:
        return {
            'seed': self.seed,
            'conflicts': len(self.conflicts),
            'idle_slots': self.idle_slots,
            'records': len(self.records),
            'accesses': self.coverage(),
        }
