# /pg_fold/simulation/checker.py
# タイトル: Static Verification of Folding Plans
# 役割: カーネルを実行せずに計画の全不変条件（分割の正しさ、配置、スロット単射性、回転、カウンタ性、
#       被覆、フェーズ2の局所性、次数プロファイル、アイドル数）を検証し、証拠付きのレポートを返す。

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from ..folding.plan import FoldPlan
from ..geometry.partition import coset_point_partition, degree_profile

logger = logging.getLogger(__name__)

_MAX_WITNESSES = 5


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    checked: int
    witnesses: Tuple[Any, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'passed': self.passed, 'checked': self.checked,
                'witnesses': [list(w) if isinstance(w, tuple) else w for w in self.witnesses]}


@dataclass(frozen=True)
class PlanReport:
    results: Tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'checks': [r.to_dict() for r in self.results]}


class _Checks:
    def __init__(self):
        self.results: List[CheckResult] = []

    def add(self, name: str, failures: List[Any], checked: int):
        self.results.append(CheckResult(name, not failures, checked, tuple(failures[:_MAX_WITNESSES])))


def check_plan(plan: FoldPlan) -> PlanReport:
    """計画を静的に検証する。失敗しても例外は投げない。"""
    space, graph = plan.space, plan.graph
    part = plan.partition
    B = len(part.blocks)
    N = space.N
    mm = plan.memory_map
    checks = _Checks()

    # 分割: ブロックは剰余類分割、グループはキャリアを含む超平面
    try:
        expected_blocks = [b.points for b in coset_point_partition(space, plan.params.k)]
    except Exception as e:
        expected_blocks = []
        checks.add('partition', [('coset_partition', str(e))], 1)
    else:
        failures = [('block', i) for i, b in enumerate(part.blocks)
                    if i >= len(expected_blocks) or b.points != expected_blocks[i]]
        if len(part.blocks) != len(expected_blocks):
            failures.append(('block_count', len(part.blocks)))
        for i, (block, carrier) in enumerate(zip(part.blocks, part.carriers)):
            if not set(block.points) <= set(carrier.points):
                failures.append(('block_in_carrier', i))
            if carrier.points and not space.is_flat(carrier.points):
                failures.append(('carrier_flat', i))
        if len(part.carriers) != B or len(part.hyperplane_blocks) != B:
            failures.append(('carrier_count', len(part.carriers), len(part.hyperplane_blocks)))
        for i, (carrier, group) in enumerate(zip(part.carriers, part.hyperplane_blocks)):
            if tuple(sorted(group)) != space.hyperplanes_containing(carrier.points):
                failures.append(('hyperplane_group', i))
        owners = Counter(h for g in part.hyperplane_blocks for h in g)
        if sorted(owners) != list(range(N)) or any(c != 1 for c in owners.values()):
            failures.append(('hyperplane_cover',))
        checks.add('partition', failures, 3 * B)

    # メモリ形状: B 個 × 総辺数 / B
    failures = []
    if mm.num_memories != B:
        failures.append(('count', mm.num_memories, B))
    if graph.num_edges % B or mm.mem_size != graph.num_edges // B:
        failures.append(('size', mm.mem_size, graph.num_edges // max(B, 1)))
    checks.add('memory_shape', failures, 2)

    # 配置: 全辺がちょうど1回、(mem, addr) は一意、辺はグループのメモリに置かれる
    group_of = {h: i for i, g in enumerate(part.hyperplane_blocks) for h in g}
    failures = []
    edge_count = Counter((p, h) for p, h, _, _ in mm.entries)
    for edge in graph.edges:
        if edge_count.get(edge, 0) != 1:
            failures.append(('edge', edge[0], edge[1], edge_count.get(edge, 0)))
    for edge in edge_count:
        if edge not in graph.edge_index:
            failures.append(('not_an_edge', edge[0], edge[1]))
    cell_count = Counter((mem, addr) for _, _, mem, addr in mm.entries)
    failures += [('collision', mem, addr) for (mem, addr), c in cell_count.items() if c > 1]
    for p, h, mem, addr in mm.entries:
        if not (0 <= mem < mm.num_memories and 0 <= addr < mm.mem_size):
            failures.append(('out_of_range', p, h, mem, addr))
        elif group_of.get(h) != mem:
            failures.append(('residency', p, h, mem, group_of.get(h)))
    checks.add('residency', failures, len(mm.entries))

    # フェーズ1: スロットごとの単射性
    phase1 = plan.phase1
    by_slot: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for unit, slots in enumerate(phase1.units):
        for s in slots:
            by_slot[s.slot].append((unit, s.mem))
    failures = []
    for slot in sorted(by_slot):
        units = [u for u, _ in by_slot[slot]]
        mems = [m for _, m in by_slot[slot]]
        if len(set(units)) != len(units) or len(set(mems)) != len(mems):
            failures.append((slot, sorted(mems)))
    checks.add('slot_injectivity', failures, len(by_slot))

    # 回転: ユニット i のラウンド j はメモリ (i+j) mod B を d[j] 回読む
    L = phase1.step_length
    failures = []
    per_round = Counter()
    for unit, slots in enumerate(phase1.units):
        for s in slots:
            if not 0 <= s.slot < phase1.slots_per_unit:
                failures.append(('slot_range', unit, s.slot))
                continue
            r, j, _ = phase1.locate_slot(s.slot)
            if s.mem != (unit + j) % B:
                failures.append((unit, s.slot, j, s.mem))
            per_round[(unit, r, j)] += 1
    uniform = plan.profile.round_lengths == plan.profile.d
    for (unit, r, j), count in per_round.items():
        limit = plan.profile.d[j] if uniform else phase1.round_lengths[j]
        if count > limit or (uniform and count != limit):
            failures.append(('round_count', unit, r, j, count))
    checks.add('rotation', failures, phase1.reads)

    # カウンタ性: 各メモリの時刻順アドレス列が 0, 1, 2, ...
    gen = plan.address_gen
    failures = [mem for mem in range(mm.num_memories) if not gen.counter_ok(mem, mm.mem_size)]
    checks.add('counter', failures, mm.num_memories)

    # 点の被覆: ステップ r のユニット i は点 S_i[r] の全ての辺をちょうど1回読む
    failures = []
    for unit, slots in enumerate(phase1.units):
        if unit >= B:
            failures.append(('unit', unit))
            continue
        read = defaultdict(list)
        for s in slots:
            edge = mm.edge_at(s.mem, s.addr)
            r = s.slot // L if L else 0
            read[r].append(edge)
        for r, point in enumerate(part.blocks[unit].points):
            expected = sorted((point, h) for h in graph.point_adjacency[point])
            got = sorted(e for e in read.get(r, []) if e is not None)
            if got != expected or len(read.get(r, [])) != len(expected):
                failures.append((unit, r, point))
    checks.add('point_coverage', failures, sum(len(b.points) for b in part.blocks))

    # フェーズ2: 局所性と被覆
    phase2 = plan.phase2
    failures = []
    for unit, tasks in enumerate(phase2.units):
        group = sorted(part.hyperplane_blocks[unit]) if unit < B else []
        if [t.hyperplane for t in tasks] != group:
            failures.append(('order', unit))
        local = Counter()
        for task in tasks:
            edges = [mm.edge_at(unit, addr) for addr in task.addrs]
            expected = [(p, task.hyperplane) for p in graph.hyperplane_adjacency[task.hyperplane]]
            if edges != expected:
                failures.append(('edges', unit, task.hyperplane))
            local.update(task.addrs)
        if sorted(local) != list(range(mm.mem_size)) or any(c != 1 for c in local.values()):
            failures.append(('coverage', unit))
    checks.add('phase2_locality', failures, len(phase2.units))

    # 次数プロファイル
    failures = []
    try:
        profile = degree_profile(space, part.blocks, part.carriers, part.hyperplane_blocks)
    except Exception as e:
        failures.append(('profile', str(e)))
    else:
        if profile.d != plan.profile.d:
            failures.append(('d', list(profile.d), list(plan.profile.d)))
        if profile.round_lengths != plan.profile.round_lengths:
            failures.append(('round_lengths',))
        if sum(plan.profile.d) != space.degree:
            failures.append(('sum', sum(plan.profile.d), space.degree))
    checks.add('degree_profile', failures, B)

    # アイドル数
    expected_idle = B * phase1.slots_per_unit - graph.num_edges
    failures = [] if phase1.idle_slots == expected_idle else [(phase1.idle_slots, expected_idle)]
    checks.add('idle_slots', failures, 1)

    report = PlanReport(tuple(checks.results))
    if report.passed:
        logger.info(f"計画の静的検証: 全 {len(report.results)} 項目合格")
    else:
        logger.warning(f"計画の静的検証: 不合格 {report.failed}")
    return report
