# /pg_fold/simulation/simulator.py
# タイトル: Lock-Step Folded Execution and Fully-Parallel Reference
# 役割: フォールディング計画をスロット単位で実行し、衝突・二重読み出し・アドレス不整合を検出する。
#       同じ二相計算を完全並列に実行する参照実装と最終状態を比較できるようにする。

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import ScheduleConflictError
from ..folding.plan import FoldPlan
from ..geometry.projective import IncidenceGraph
from .enums import AccessOp, Phase
from .kernels.base import Kernel
from .tracker import EdgeState, SimTrace, TraceRecord

logger = logging.getLogger(__name__)

BOTH_PHASES = (Phase.POINT, Phase.HYPERPLANE)


def random_edge_state(graph: IncidenceGraph, kernel: Kernel, seed: int) -> EdgeState:
    """シードから決定的に生成した初期状態。"""
    return EdgeState.random(graph.num_edges, kernel, seed)


def _evaluate(values: List[int], groups: Sequence[Sequence[int]], kernel: Kernel) -> List[int]:
    new = list(values)
    for edge_ids in groups:
        reduced = kernel.reduce(values[e] for e in edge_ids)
        for e in edge_ids:
            new[e] = kernel.update(reduced, values[e])
    return new


def run_reference(
    graph: IncidenceGraph,
    kernel: Kernel,
    init: EdgeState,
    iters: int,
    phases: Sequence[Phase] = BOTH_PHASES,
) -> EdgeState:
    """
    完全並列の参照実行。各反復でフェーズ1は点ごと、フェーズ2は超平面ごとに縮約し、接続する全辺を更新する。
    """
    if iters < 0:
        raise ValueError(f"iters は0以上が必要です: {iters}")
    if len(init) != graph.num_edges:
        raise ValueError(f"初期状態の長さ {len(init)} が辺数 {graph.num_edges} と一致しません。")

    point_groups = [graph.point_edges(p) for p in range(graph.num_vertices)]
    hyperplane_groups = [graph.hyperplane_edges(h) for h in range(graph.num_vertices)]
    state = init.copy()
    for _ in range(iters):
        for phase in phases:
            groups = point_groups if Phase(phase) == Phase.POINT else hyperplane_groups
            state.values = _evaluate(state.values, groups, kernel)
        state.iteration += 1
    return state


class _FoldedMachine:
    """B 個のユニットと B 個のデュアルポートメモリの論理スロットモデル。"""

    def __init__(self, plan: FoldPlan, kernel: Kernel, trace: SimTrace):
        self.plan = plan
        self.kernel = kernel
        self.trace = trace
        self.B = plan.num_units
        self.size = plan.memory_map.mem_size
        self.edge_ids = plan.graph.edge_index
        self.words: List[List[Optional[int]]] = [[None] * self.size for _ in range(self.B)]
        self.edges: List[List[Optional[Tuple[int, int]]]] = [[None] * self.size for _ in range(self.B)]
        self.slot_table = self._index_phase1()

    def _fail(self, message: str, **details):
        self.trace.conflicts.append({'message': message, **details})
        logger.error(f"スケジュール違反: {message} {details}")
        raise ScheduleConflictError(message, **details)

    def _index_phase1(self) -> Dict[int, List[Tuple[int, object]]]:
        table = defaultdict(list)
        limit = self.plan.phase1.slots_per_unit
        for unit, slots in enumerate(self.plan.phase1.units):
            for s in slots:
                if not 0 <= s.slot < limit:
                    self._fail(f"スロット {s.slot} がフェーズ1の範囲 [0, {limit}) の外です。", slot=s.slot, units=[unit])
                table[s.slot].append((unit, s))
        return table

    def load(self, state: EdgeState):
        """メモリマップに従って辺の値をメモリに配置する。"""
        for p, h, mem, addr in self.plan.memory_map.entries:
            if not (0 <= mem < self.B and 0 <= addr < self.size):
                self._fail(f"辺 ({p}, {h}) のアドレス ({mem}, {addr}) が範囲外です。", memory=mem, addr=addr, units=[])
            if self.edges[mem][addr] is not None:
                self._fail(
                    f"アドレス衝突: メモリ {mem} のアドレス {addr} に辺 {self.edges[mem][addr]} と ({p}, {h}) が割り当てられています。",
                    memory=mem, addr=addr, units=[], edges=[list(self.edges[mem][addr]), [p, h]]
                )
            if (p, h) not in self.edge_ids:
                self._fail(f"({p}, {h}) は接続グラフの辺ではありません。", memory=mem, addr=addr, units=[])
            self.edges[mem][addr] = (p, h)
            self.words[mem][addr] = state.values[self.edge_ids[(p, h)]]
        placed = sum(1 for row in self.edges for e in row if e is not None)
        if placed != len(self.edge_ids):
            self._fail(f"メモリに配置された辺 {placed} 本が総辺数 {len(self.edge_ids)} と一致しません。",
                       memory=None, units=[], placed=placed)

    def unload(self, iteration: int) -> EdgeState:
        values = [0] * len(self.edge_ids)
        for mem in range(self.B):
            for addr, edge in enumerate(self.edges[mem]):
                values[self.edge_ids[edge]] = self.words[mem][addr]
        return EdgeState(values, iteration)

    def _emit(self, slot: int, unit: int, mem: int, addr: int, op: AccessOp, phase: Phase, iteration: int):
        self.trace.record(TraceRecord(slot, unit, mem, addr, op, self.edges[mem][addr], phase, iteration))

    def run_phase1(self, base: int, iteration: int):
        phase1 = self.plan.phase1
        L = phase1.step_length
        blocks = self.plan.partition.blocks
        counters = [0] * self.B
        seen = set()
        for r in range(phase1.points_per_block):
            acc = [self.kernel.identity] * self.B
            touched: List[List[Tuple[int, int, int]]] = [[] for _ in range(self.B)]
            busy = 0
            for slot in range(r * L, (r + 1) * L):
                accesses = self.slot_table.get(slot, ())
                by_mem: Dict[int, int] = {}
                by_unit = set()
                for unit, s in accesses:
                    if unit in by_unit:
                        self._fail(f"スロット {slot} でユニット {unit} が複数回アクセスしています。",
                                   slot=slot, memory=s.mem, units=[unit])
                    by_unit.add(unit)
                    if s.mem in by_mem:
                        self._fail(f"スロット {slot} でメモリ {s.mem} にユニット {by_mem[s.mem]} と {unit} が同時にアクセスしています。",
                                   slot=slot, memory=s.mem, units=[by_mem[s.mem], unit])
                    by_mem[s.mem] = unit
                    if not (0 <= s.mem < self.B and 0 <= s.addr < self.size) or self.edges[s.mem][s.addr] is None:
                        self._fail(f"スロット {slot} のアクセス先 ({s.mem}, {s.addr}) にデータがありません。",
                                   slot=slot, memory=s.mem, units=[unit], addr=s.addr)
                    if (s.mem, s.addr) in seen:
                        self._fail(f"スロット {slot} でメモリ {s.mem} のアドレス {s.addr} が二重に読み出されました。",
                                   slot=slot, memory=s.mem, units=[unit], addr=s.addr)
                    if s.addr != counters[s.mem]:
                        self._fail(f"スロット {slot} でメモリ {s.mem} のアドレス {s.addr} はカウンタ値 {counters[s.mem]} と一致しません。",
                                   slot=slot, memory=s.mem, units=[unit], addr=s.addr, expected=counters[s.mem])
                    point = self.edges[s.mem][s.addr][0]
                    if point != blocks[unit].points[r]:
                        self._fail(f"スロット {slot} でユニット {unit} が処理中の点 {blocks[unit].points[r]} 以外の辺 (点 {point}) を読み出しました。",
                                   slot=slot, memory=s.mem, units=[unit], addr=s.addr)
                    seen.add((s.mem, s.addr))
                    counters[s.mem] += 1
                    acc[unit] = self.kernel.combine(acc[unit], self.words[s.mem][s.addr])
                    touched[unit].append((s.mem, s.addr, slot))
                    self._emit(base + phase1.read_cycle(slot), unit, s.mem, s.addr, AccessOp.READ, Phase.POINT, iteration)
                    busy += 1
            self.trace.monitor.record_slots(busy, self.B * L - busy)

            for unit in range(self.B):
                for mem, addr, slot in touched[unit]:
                    self.words[mem][addr] = self.kernel.update(acc[unit], self.words[mem][addr])
                    self._emit(base + phase1.write_cycle(slot), unit, mem, addr, AccessOp.WRITE, Phase.POINT, iteration)

        if len(seen) != len(self.edge_ids):
            self._fail(f"フェーズ1で読み出された辺 {len(seen)} 本が総辺数 {len(self.edge_ids)} と一致しません。",
                       memory=None, units=[], read=len(seen))

    def run_phase2(self, base: int, iteration: int):
        phase2 = self.plan.phase2
        seen = set()
        for unit, tasks in enumerate(phase2.units):
            busy = 0
            for t, task in enumerate(tasks):
                acc = self.kernel.identity
                for ordinal, addr in enumerate(task.addrs):
                    slot = base + phase2.read_cycle(t, ordinal)
                    if not 0 <= addr < self.size or self.edges[unit][addr] is None:
                        self._fail(f"ユニット {unit} の局所アドレス {addr} にデータがありません。",
                                   slot=slot, memory=unit, units=[unit], addr=addr)
                    if self.edges[unit][addr][1] != task.hyperplane:
                        self._fail(f"ユニット {unit} が超平面 {task.hyperplane} 以外の辺 {self.edges[unit][addr]} を読み出しました。",
                                   slot=slot, memory=unit, units=[unit], addr=addr)
                    if (unit, addr) in seen:
                        self._fail(f"フェーズ2でメモリ {unit} のアドレス {addr} が二重に読み出されました。",
                                   slot=slot, memory=unit, units=[unit], addr=addr)
                    seen.add((unit, addr))
                    acc = self.kernel.combine(acc, self.words[unit][addr])
                    self._emit(slot, unit, unit, addr, AccessOp.READ, Phase.HYPERPLANE, iteration)
                    busy += 1
                for ordinal, addr in enumerate(task.addrs):
                    self.words[unit][addr] = self.kernel.update(acc, self.words[unit][addr])
                    self._emit(base + phase2.write_cycle(t, ordinal), unit, unit, addr, AccessOp.WRITE,
                               Phase.HYPERPLANE, iteration)
            self.trace.monitor.record_slots(busy, phase2.slots_per_unit - busy)

        if len(seen) != len(self.edge_ids):
            self._fail(f"フェーズ2で読み出された辺 {len(seen)} 本が総辺数 {len(self.edge_ids)} と一致しません。",
                       memory=None, units=[], read=len(seen))


def run_folded(
    plan: FoldPlan,
    kernel: Kernel,
    init: EdgeState,
    iters: int,
    keep_trace: bool = False,
    seed: Optional[int] = None,
) -> Tuple[EdgeState, SimTrace]:
    """
    計画をロックステップで実行する。衝突・二重読み出し・アドレス不整合は ScheduleConflictError で中断する。
    """
    if iters < 0:
        raise ValueError(f"iters は0以上が必要です: {iters}")
    trace = SimTrace(seed=seed, keep_records=keep_trace)
    machine = _FoldedMachine(plan, kernel, trace)
    machine.load(init)

    period = plan.phase1.cycles + plan.phase2.cycles
    for it in range(iters):
        base = it * period
        machine.run_phase1(base, init.iteration + it)
        machine.run_phase2(base + plan.phase1.cycles, init.iteration + it)

    final = machine.unload(init.iteration + iters)
    trace.final_state = final
    logger.info(
        f"フォールディング実行が完了しました: {iters} 反復, 衝突 {len(trace.conflicts)}, "
        f"アイドル {trace.idle_slots}, 稼働率 {trace.monitor.utilization}"
    )
    return final, trace
