# /pg_fold/folding/plan.py
# タイトル: Conflict-Free Folding Plan Builder
# 役割: スプレッド分割から、辺のメモリ配置・フェーズ1の回転スケジュール・フェーズ2の局所スケジュール・
#       アドレス生成（カウンタ／LUT）を組み立てる。

import bisect
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

from ..config import settings
from ..errors import PlanError
from ..geometry.enums import CarrierStrategy
from ..geometry.partition import DegreeProfile, SpreadPartition, build_partition, degree_profile
from ..geometry.projective import (
    IncidenceGraph, ProjParams, ProjectiveSpace, build_space, incidence_graph,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class PlanParams:
    m: int
    q: int
    k: int
    poly: Tuple[int, ...]
    strategy: CarrierStrategy = CarrierStrategy.EQUIVARIANT
    overlap: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m, 'q': self.q, 'k': self.k, 'poly': list(self.poly),
            'strategy': self.strategy.value, 'overlap': self.overlap,
        }


@dataclass(frozen=True)
class MemoryMap:
    """辺 (点, 超平面) → (メモリ, アドレス)。entries は (point, hyperplane, mem, addr) の並び。"""
    num_memories: int
    mem_size: int
    entries: Tuple[Tuple[int, int, int, int], ...]

    @cached_property
    def assignment(self) -> Dict[Edge, Tuple[int, int]]:
        return {(p, h): (mem, addr) for p, h, mem, addr in self.entries}

    @cached_property
    def resident(self) -> Dict[Tuple[int, int], Edge]:
        return {(mem, addr): (p, h) for p, h, mem, addr in self.entries}

    def locate(self, edge: Edge) -> Tuple[int, int]:
        try:
            return self.assignment[edge]
        except KeyError:
            raise PlanError(f"辺 {edge} はメモリマップに存在しません。", edge=list(edge)) from None

    def edge_at(self, mem: int, addr: int) -> Optional[Edge]:
        return self.resident.get((mem, addr))

    def memory_contents(self, mem: int) -> List[Edge]:
        """アドレス順に並べたメモリの内容。"""
        return [edge for (m, _), edge in sorted(self.resident.items()) if m == mem]


@dataclass(frozen=True)
class Phase1Slot:
    slot: int
    mem: int
    addr: int


@dataclass(frozen=True)
class Phase2Task:
    hyperplane: int
    addrs: Tuple[int, ...]


@dataclass(frozen=True)
class Phase1Schedule:
    """
    全ユニットがロックステップで進む読み出しスケジュール。
    読み出しスロットは r·L + (ラウンド j のオフセット) + 添字 で、L はラウンド長の総和。
    書き戻しは読み出しを L だけ遅らせた鏡像になる。
    """
    units: Tuple[Tuple[Phase1Slot, ...], ...]
    round_lengths: Tuple[int, ...]
    points_per_block: int
    overlap: bool = False

    @property
    def step_length(self) -> int:
        return sum(self.round_lengths)

    @cached_property
    def round_offsets(self) -> Tuple[int, ...]:
        offsets, acc = [], 0
        for length in self.round_lengths:
            offsets.append(acc)
            acc += length
        return tuple(offsets)

    @property
    def slots_per_unit(self) -> int:
        return self.points_per_block * self.step_length

    @property
    def reads(self) -> int:
        return sum(len(u) for u in self.units)

    @property
    def idle_slots(self) -> int:
        return len(self.units) * self.slots_per_unit - self.reads

    @property
    def cycles(self) -> int:
        """書き戻しを含むフェーズ1の総サイクル数。"""
        L = self.step_length
        if self.overlap:
            return (self.points_per_block + 1) * L
        return 2 * self.points_per_block * L

    def locate_slot(self, slot: int) -> Tuple[int, int, int]:
        """読み出しスロット → (ステップ r, ラウンド j, ラウンド内の添字)。"""
        L = self.step_length
        r, s = divmod(slot, L)
        j = bisect.bisect_right(self.round_offsets, s) - 1
        while self.round_lengths[j] == 0:
            j -= 1
        return r, j, s - self.round_offsets[j]

    def read_cycle(self, slot: int) -> int:
        if self.overlap:
            return slot
        return slot + (slot // self.step_length) * self.step_length

    def write_cycle(self, slot: int) -> int:
        return self.read_cycle(slot) + self.step_length


@dataclass(frozen=True)
class Phase2Schedule:
    """ユニット i はグループ i の超平面を昇順に、自メモリのみにアクセスして処理する。"""
    units: Tuple[Tuple[Phase2Task, ...], ...]
    task_length: int
    overlap: bool = False

    @property
    def slots_per_unit(self) -> int:
        return max((sum(len(t.addrs) for t in tasks) for tasks in self.units), default=0)

    @property
    def cycles(self) -> int:
        if self.overlap:
            return self.slots_per_unit + self.task_length
        return 2 * self.slots_per_unit

    def read_cycle(self, task: int, ordinal: int) -> int:
        D = self.task_length
        return (task if self.overlap else 2 * task) * D + ordinal

    def write_cycle(self, task: int, ordinal: int) -> int:
        return self.read_cycle(task, ordinal) + self.task_length

    @cached_property
    def lut(self) -> Dict[Tuple[int, int], int]:
        """(超平面, 接続辺の序数) → 局所アドレス。"""
        return {
            (task.hyperplane, ordinal): addr
            for tasks in self.units for task in tasks
            for ordinal, addr in enumerate(task.addrs)
        }


class AddressGen:
    """フェーズ1はメモリごとのカウンタ、フェーズ2はユニットごとのLUTとしてアドレスを生成する。"""

    def __init__(self, phase1: Phase1Schedule, phase2: Phase2Schedule, num_memories: int):
        self.phase1 = phase1
        self.phase2 = phase2
        self.num_memories = num_memories
        self._tables = {
            (unit, task.hyperplane): task.addrs
            for unit, tasks in enumerate(phase2.units) for task in tasks
        }

    @cached_property
    def _chronological(self) -> Dict[int, List[int]]:
        accesses = defaultdict(list)
        for unit, slots in enumerate(self.phase1.units):
            for s in slots:
                accesses[s.mem].append((s.slot, unit, s.addr))
        return {mem: [addr for _, _, addr in sorted(seq)] for mem, seq in accesses.items()}

    def replay_counter(self, mem: int) -> Tuple[int, ...]:
        """メモリ mem に対してフェーズ1で発行されるアドレス列（時刻順）。"""
        return tuple(self._chronological.get(mem, ()))

    def counter_ok(self, mem: int, mem_size: int) -> bool:
        return self.replay_counter(mem) == tuple(range(mem_size))

    def lookup(self, unit: int, hyperplane: int, ordinal: int) -> int:
        try:
            return self._tables[(unit, hyperplane)][ordinal]
        except (KeyError, IndexError):
            raise PlanError(
                f"LUT にエントリがありません: unit={unit}, hyperplane={hyperplane}, ordinal={ordinal}",
                unit=unit, hyperplane=hyperplane, ordinal=ordinal
            ) from None


@dataclass(frozen=True)
class FoldPlan:
    params: PlanParams
    partition: SpreadPartition
    profile: DegreeProfile
    memory_map: MemoryMap
    phase1: Phase1Schedule
    phase2: Phase2Schedule
    space: ProjectiveSpace = field(compare=False, repr=False)
    graph: IncidenceGraph = field(compare=False, repr=False)

    @property
    def num_units(self) -> int:
        return self.partition.num_blocks

    @property
    def fold_factor(self) -> int:
        return self.partition.params.points_per_block

    @cached_property
    def address_gen(self) -> AddressGen:
        return AddressGen(self.phase1, self.phase2, self.memory_map.num_memories)

    @property
    def lut(self) -> Dict[Tuple[int, int], int]:
        return self.phase2.lut

    @property
    def utilization(self) -> Fraction:
        total = self.num_units * self.phase1.slots_per_unit
        return Fraction(self.phase1.reads, total) if total else Fraction(0)

    def summary(self) -> Dict[str, Any]:
        u = self.utilization
        return {
            'params': self.params.to_dict(),
            'case': self.partition.params.case.value,
            'units': self.num_units,
            'memories': {'count': self.memory_map.num_memories, 'size': self.memory_map.mem_size},
            'fold_factor': self.fold_factor,
            'degree': self.space.degree,
            'degree_profile': list(self.profile.d),
            'round_lengths': list(self.profile.round_lengths),
            'phase1_reads_per_unit': len(self.phase1.units[0]) if self.phase1.units else 0,
            'phase1_slots_per_unit': self.phase1.slots_per_unit,
            'phase1_cycles': self.phase1.cycles,
            'phase2_slots_per_unit': self.phase2.slots_per_unit,
            'phase2_cycles': self.phase2.cycles,
            'idle_slots': self.phase1.idle_slots,
            'utilization': [u.numerator, u.denominator],
        }


def _edges_by_memory(partition: SpreadPartition, graph: IncidenceGraph) -> List[Dict[int, List[int]]]:
    """点ごとに、接続する超平面をグループ（メモリ）別に昇順で並べる。"""
    group_of = partition.group_of_hyperplane(graph.num_vertices)
    by_mem: List[Dict[int, List[int]]] = [defaultdict(list) for _ in range(graph.num_vertices)]
    for p, adjacency in enumerate(graph.point_adjacency):
        for h in adjacency:
            by_mem[p][int(group_of[h])].append(h)
    return by_mem


def build_memory_map(partition: SpreadPartition, graph: IncidenceGraph) -> MemoryMap:
    """
    辺 (p, h) を h の属するグループのメモリに置く。アドレスはフェーズ1でのアクセス順
    （点ステップが外側、ラウンドが内側、ラウンド内は超平面昇順）に振るので、フェーズ1のアドレス生成は単なるカウンタになる。
    """
    B = partition.num_blocks
    ppb = partition.params.points_per_block
    total = graph.num_edges
    sizes = [len(g) * graph.degree for g in partition.hyperplane_blocks]
    if total % B != 0 or any(s != total // B for s in sizes):
        raise PlanError(
            f"メモリ容量が総辺数 / B = {total}/{B} と一致しません（グループ別 {sorted(set(sizes))}）。",
            total_edges=total, memories=B, sizes=sizes
        )
    mem_size = total // B

    by_mem = _edges_by_memory(partition, graph)
    counters = [0] * B
    entries = []
    for r in range(ppb):
        for j in range(B):
            for mem in range(B):
                p = partition.blocks[(mem - j) % B].points[r]
                for h in by_mem[p].get(mem, ()):
                    entries.append((p, h, mem, counters[mem]))
                    counters[mem] += 1

    if len(entries) != total:
        raise PlanError(f"配置された辺 {len(entries)} 本が総辺数 {total} と一致しません。", placed=len(entries))
    entries.sort()
    logger.info(f"メモリマップを構成しました: {B} メモリ × {mem_size} ワード")
    return MemoryMap(B, mem_size, tuple(entries))


def build_phase1_schedule(
    partition: SpreadPartition,
    memory_map: MemoryMap,
    profile: DegreeProfile,
    graph: IncidenceGraph,
    overlap: bool = False,
) -> Phase1Schedule:
    """ユニット i はステップ r でブロック i の r 番目の点を処理し、ラウンド j でメモリ (i+j) mod B を読む。"""
    B = partition.num_blocks
    ppb = partition.params.points_per_block
    lengths = profile.round_lengths
    L = sum(lengths)
    offsets = [sum(lengths[:j]) for j in range(B)]
    by_mem = _edges_by_memory(partition, graph)

    units = []
    for i in range(B):
        slots = []
        for r in range(ppb):
            p = partition.blocks[i].points[r]
            for j in range(B):
                mem = (i + j) % B
                hyperplanes = by_mem[p].get(mem, ())
                if len(hyperplanes) > lengths[j]:
                    raise PlanError(
                        f"点 {p} のラウンド {j} の読み出し {len(hyperplanes)} 件がラウンド長 {lengths[j]} を超えます。",
                        point=p, round=j
                    )
                for idx, h in enumerate(hyperplanes):
                    mem_of, addr = memory_map.locate((p, h))
                    slots.append(Phase1Slot(r * L + offsets[j] + idx, mem_of, addr))
        units.append(tuple(slots))

    schedule = Phase1Schedule(tuple(units), tuple(lengths), ppb, overlap)
    if schedule.idle_slots:
        logger.warning(f"次数プロファイルが非一様のため、アイドルスロット {schedule.idle_slots} 個を挿入しました。")
    logger.info(
        f"フェーズ1スケジュールを構成しました: ユニットあたり {schedule.slots_per_unit} スロット, "
        f"{schedule.cycles} サイクル (overlap={overlap})"
    )
    return schedule


def build_phase2_schedule(
    partition: SpreadPartition,
    memory_map: MemoryMap,
    graph: IncidenceGraph,
    overlap: bool = False,
) -> Phase2Schedule:
    """ユニット i はグループ i の超平面を昇順に処理し、各超平面の辺は点の昇順で自メモリから読む。"""
    units = []
    for i, group in enumerate(partition.hyperplane_blocks):
        tasks = []
        for h in sorted(group):
            addrs = []
            for p in graph.hyperplane_adjacency[h]:
                mem, addr = memory_map.locate((p, h))
                if mem != i:
                    raise PlanError(
                        f"辺 ({p}, {h}) はメモリ {i} ではなく {mem} に置かれています。",
                        edge=[p, h], expected=i, found=mem
                    )
                addrs.append(addr)
            tasks.append(Phase2Task(h, tuple(addrs)))
        units.append(tuple(tasks))
    logger.info(f"フェーズ2スケジュールを構成しました: {len(units)} ユニット")
    return Phase2Schedule(tuple(units), graph.degree, overlap)


def fold_plan(
    m: int,
    q: int,
    k: int,
    poly: Optional[Tuple[int, ...]] = None,
    strategy: Optional[CarrierStrategy] = None,
    overlap: Optional[bool] = None,
) -> FoldPlan:
    """P(m, GF(q)) を k 次元ブロックで畳み込む計画を端から端まで構成する。"""
    strategy = strategy or CarrierStrategy(settings.CARRIER_STRATEGY)
    overlap = settings.OVERLAP_WRITEBACK if overlap is None else overlap

    space = build_space(ProjParams(m, q, tuple(poly) if poly else None))
    partition = build_partition(space, k, strategy)
    graph = incidence_graph(space)
    profile = degree_profile(space, partition.blocks, partition.carriers, partition.hyperplane_blocks)
    memory_map = build_memory_map(partition, graph)
    phase1 = build_phase1_schedule(partition, memory_map, profile, graph, overlap)
    phase2 = build_phase2_schedule(partition, memory_map, graph, overlap)

    params = PlanParams(m, q, k, tuple(space.field.spec.poly), strategy, overlap)
    plan = FoldPlan(params, partition, profile, memory_map, phase1, phase2, space, graph)
    logger.info(
        f"フォールディング計画を構成しました: {partition.num_blocks} ユニット, 畳み込み係数 {plan.fold_factor}, "
        f"アイドル {phase1.idle_slots}"
    )
    return plan
