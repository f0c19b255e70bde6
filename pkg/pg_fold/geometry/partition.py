# /pg_fold/geometry/partition.py
# タイトル: Coset-Decomposition Spreads, Dual Carriers and Structural Checks
# 役割: 部分体の剰余類分解による点集合のスプレッド分割、双対キャリアと超平面分割の構成、
#       スケジュールが依存する構造的性質（補題群）の網羅的検証を行う。

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..errors import PartitionError
from .enums import CarrierStrategy, FoldCase
from .galois import subgroup_stride
from .projective import Flat, ProjectiveSpace, phi, points_in

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldParams:
    """m+1 = (k+1)·t の分解と、そこから導かれるブロック数 B・剰余類ストライド β。"""
    m: int
    q: int
    k: int

    @classmethod
    def for_space(cls, space: ProjectiveSpace, k: int) -> 'FoldParams':
        m = space.m
        if k < 0 or k >= m:
            raise PartitionError(
                f"ブロック次元 k={k} は 0 <= k < m={m} を満たす必要があります。", m=m, k=k
            )
        if (m + 1) % (k + 1) != 0:
            raise PartitionError(
                f"k+1={k + 1} は m+1={m + 1} を割り切りません。", m_plus_1=m + 1, k_plus_1=k + 1
            )
        return cls(m, space.q, k)

    @property
    def t(self) -> int:
        return (self.m + 1) // (self.k + 1)

    @property
    def case(self) -> FoldCase:
        return FoldCase.ODD if self.t == 2 else FoldCase.EVEN_FACTORABLE

    @property
    def subfield_order(self) -> int:
        """Q = q^(k+1)"""
        return self.q ** (self.k + 1)

    @property
    def num_blocks(self) -> int:
        return (self.q ** (self.m + 1) - 1) // (self.subfield_order - 1)

    @property
    def beta(self) -> int:
        return self.num_blocks

    @property
    def points_per_block(self) -> int:
        return points_in(self.k + 1, self.q)

    @property
    def carriers_per_block(self) -> int:
        """各ブロックを含むキャリアの個数。"""
        Q = self.subfield_order
        return (Q ** (self.t - 1) - 1) // (Q - 1)

    @property
    def carrier_dim(self) -> int:
        """キャリアの射影次元。t=2 ではブロック自身。"""
        return max(self.t - 1, 1) * (self.k + 1) - 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m, 'q': self.q, 'k': self.k, 't': self.t, 'case': self.case.value,
            'blocks': self.num_blocks, 'beta': self.beta, 'points_per_block': self.points_per_block,
        }


@dataclass(frozen=True)
class SpreadPartition:
    params: FoldParams
    blocks: Tuple[Flat, ...]
    carriers: Tuple[Flat, ...]
    hyperplane_blocks: Tuple[Tuple[int, ...], ...]

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_of_point(self, N: int) -> np.ndarray:
        owner = np.full(N, -1, dtype=np.int64)
        for i, block in enumerate(self.blocks):
            owner[list(block.points)] = i
        return owner

    def group_of_hyperplane(self, N: int) -> np.ndarray:
        owner = np.full(N, -1, dtype=np.int64)
        for i, group in enumerate(self.hyperplane_blocks):
            owner[list(group)] = i
        return owner

    @property
    def is_equivariant(self) -> bool:
        """T_i = α^i · T_0 が成り立つか。"""
        if not self.carriers:
            return False
        base = self.carriers[0].points
        N = sum(len(b) for b in self.blocks)
        return all(
            carrier.points == tuple(sorted((x + i) % N for x in base))
            for i, carrier in enumerate(self.carriers)
        )


@dataclass(frozen=True)
class DegreeProfile:
    """
    d[j] = ブロック i の点が超平面グループ (i+j) mod B から接続される超平面の数。
    round_lengths は全ての点での各ラウンドの最大値、deviations は d から外れた (block, point, round, count)。
    """
    d: Tuple[int, ...]
    round_lengths: Tuple[int, ...]
    deviations: Tuple[Tuple[int, int, int, int], ...] = ()

    @property
    def uniform(self) -> bool:
        return not self.deviations

    @property
    def total(self) -> int:
        return sum(self.d)


# --- 点の分割 ---

def coset_point_partition(space: ProjectiveSpace, k: int) -> Tuple[Flat, ...]:
    """
    GF(q^(k+1))* の剰余類 {α^(i + jβ)} によって点集合を B 個の k次元フラットに分割する。
    """
    fp = FoldParams.for_space(space, k)
    n = space.field.n
    beta = subgroup_stride(n, fp.subfield_order - 1)
    if beta != fp.beta or fp.num_blocks * fp.points_per_block != space.N:
        raise PartitionError(
            f"ブロック数の公式と体の構造が一致しません: β={beta}, B={fp.num_blocks}, N={space.N}",
            beta=beta, blocks=fp.num_blocks, points=space.N
        )

    blocks = []
    for i in range(fp.num_blocks):
        points = tuple(sorted({((i + j * beta) % n) % space.N for j in range(fp.subfield_order - 1)}))
        flat = space.span(points)
        if flat.points != points or flat.dim != k or len(points) != fp.points_per_block:
            raise PartitionError(
                f"ブロック {i} は {k} 次元フラットになっていません（点 {len(points)} 個, span 次元 {flat.dim}）。",
                block=i, points=list(points)
            )
        blocks.append(flat)
    logger.info(f"{space} を {len(blocks)} 個の {k} 次元フラットに分割しました（β={beta}）。")
    return tuple(blocks)


# --- キャリアと超平面分割 ---

def _hyperplane_groups(space: ProjectiveSpace, carriers: Sequence[Flat], fp: FoldParams) -> Tuple[Tuple[int, ...], ...]:
    groups = tuple(space.hyperplanes_containing(c.points) for c in carriers)
    sizes = [len(g) for g in groups]
    seen: Dict[int, int] = {}
    for i, group in enumerate(groups):
        for h in group:
            if h in seen:
                raise PartitionError(
                    f"超平面 {h} がキャリア {seen[h]} と {i} の両方に含まれています。",
                    hyperplane=h, carriers=[seen[h], i]
                )
            seen[h] = i
    if len(seen) != space.N or any(s != fp.points_per_block for s in sizes):
        raise PartitionError(
            f"超平面グループが超平面集合の分割になっていません（被覆 {len(seen)}/{space.N}, サイズ {sorted(set(sizes))}）。",
            covered=len(seen), sizes=sizes
        )
    return groups


def _fold_params_of(space: ProjectiveSpace, blocks: Sequence[Flat]) -> FoldParams:
    if not blocks:
        raise PartitionError("ブロックが空です。")
    return FoldParams.for_space(space, blocks[0].dim)


def build_carriers_odd(space: ProjectiveSpace, blocks: Sequence[Flat]) -> Tuple[Tuple[Flat, ...], Tuple[Tuple[int, ...], ...]]:
    """t = 2 の場合: キャリアはブロック自身、グループ i は S_i を含む超平面。"""
    fp = _fold_params_of(space, blocks)
    if fp.t != 2:
        raise PartitionError(f"奇数ケースの構成には t=2 が必要です（t={fp.t}）。", t=fp.t)
    carriers = tuple(blocks)
    return carriers, _hyperplane_groups(space, carriers, fp)


def _equivariant_carriers(space: ProjectiveSpace, blocks: Sequence[Flat], fp: FoldParams) -> Optional[Tuple[Flat, ...]]:
    base = blocks[0]
    used = 1
    for block in blocks[1:]:
        if used == fp.t - 1:
            break
        if block.issubset(base):
            continue
        base = space.join(base, block)
        used += 1
    if base.dim != fp.carrier_dim:
        raise PartitionError(
            f"T_0 の次元 {base.dim} が期待値 {fp.carrier_dim} と一致しません。", dim=base.dim
        )
    orbit = tuple(space.shift(base, i) for i in range(fp.num_blocks))
    distinct = len({c.points for c in orbit})
    if distinct < fp.num_blocks:
        logger.warning(
            f"T_0 の軌道に含まれる相異なるキャリアは {distinct} 個で、B={fp.num_blocks} に足りません。"
            "マッチングによる割当にフォールバックします。"
        )
        return None
    return orbit


def _enumerate_carriers(space: ProjectiveSpace, blocks: Sequence[Flat], fp: FoldParams) -> List[Flat]:
    """(t-1) 個のブロックの張るフラットを全て列挙し、点集合で重複を除く。"""
    found: Dict[Tuple[int, ...], Flat] = {}
    covered: List[frozenset] = []
    for combo in itertools.combinations(range(len(blocks)), fp.t - 1):
        members = frozenset(combo)
        if any(members <= c for c in covered):
            continue
        flat = space.join(*(blocks[i] for i in combo))
        if flat.dim != fp.carrier_dim or flat.points in found:
            continue
        found[flat.points] = flat
        covered.append(frozenset(i for i, b in enumerate(blocks) if b.issubset(flat)))
    return sorted(found.values(), key=lambda f: f.points)


def _lexicographic_matching(blocks: Sequence[Flat], candidates: Sequence[Flat]) -> Dict[int, int]:
    """
    ブロック↔キャリアの完全マッチングのうち、ブロック添字順に最小のキャリア添字を選んだものを返す。
    各固定の後に残りのグラフで完全マッチングが存在することを Hopcroft-Karp で確認する。
    """
    options = {
        i: [c for c, carrier in enumerate(candidates) if block.issubset(carrier)]
        for i, block in enumerate(blocks)
    }

    def perfect(free_blocks: List[int], used: set) -> bool:
        if not free_blocks:
            return True
        graph = nx.Graph()
        top = [('block', i) for i in free_blocks]
        graph.add_nodes_from(top, bipartite=0)
        for i in free_blocks:
            for c in options[i]:
                if c not in used:
                    graph.add_edge(('block', i), ('carrier', c))
        matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
        return all(node in matching for node in top)

    if not perfect(list(range(len(blocks))), set()):
        raise PartitionError(
            "ブロックとキャリアの完全マッチングが存在しません（内部不整合）。",
            blocks=len(blocks), carriers=len(candidates),
            options={i: opts for i, opts in options.items() if not opts}
        )
    assignment: Dict[int, int] = {}
    used: set = set()
    for i in range(len(blocks)):
        remaining = list(range(i + 1, len(blocks)))
        for c in options[i]:
            if c in used:
                continue
            if perfect(remaining, used | {c}):
                assignment[i] = c
                used.add(c)
                break
    return assignment


def build_carriers_even(
    space: ProjectiveSpace,
    blocks: Sequence[Flat],
    strategy: CarrierStrategy = CarrierStrategy.EQUIVARIANT,
) -> Tuple[Tuple[Flat, ...], Tuple[Tuple[int, ...], ...]]:
    """
    t >= 3 の場合: 各キャリアは (t-1) 個のブロックの張るフラットで、S_i ⊆ T_i となるよう全単射に割り当てる。
    既定は同変割当 T_i = α^i · T_0 で、軌道が B 個に満たなければマッチングで割り当てる。
    """
    fp = _fold_params_of(space, blocks)
    if fp.t < 3:
        raise PartitionError(f"偶数分解ケースの構成には t>=3 が必要です（t={fp.t}）。", t=fp.t)

    carriers = None
    if strategy == CarrierStrategy.EQUIVARIANT:
        carriers = _equivariant_carriers(space, blocks, fp)
    if carriers is None:
        candidates = _enumerate_carriers(space, blocks, fp)
        if len(candidates) != fp.num_blocks:
            raise PartitionError(
                f"相異なるキャリアの個数 {len(candidates)} が B={fp.num_blocks} と一致しません。",
                carriers=len(candidates), blocks=fp.num_blocks
            )
        assignment = _lexicographic_matching(blocks, candidates)
        carriers = tuple(candidates[assignment[i]] for i in range(len(blocks)))
        logger.info(f"マッチングにより {len(carriers)} 個のキャリアを割り当てました。")

    for i, (block, carrier) in enumerate(zip(blocks, carriers)):
        if not block.issubset(carrier):
            raise PartitionError(f"S_{i} が T_{i} に含まれていません。", block=i)
    return tuple(carriers), _hyperplane_groups(space, carriers, fp)


def build_partition(space: ProjectiveSpace, k: int, strategy: CarrierStrategy = CarrierStrategy.EQUIVARIANT) -> SpreadPartition:
    """点の剰余類分割からキャリアと超平面分割までを一括で構成する。"""
    fp = FoldParams.for_space(space, k)
    blocks = coset_point_partition(space, k)
    if fp.case == FoldCase.ODD:
        carriers, groups = build_carriers_odd(space, blocks)
    else:
        carriers, groups = build_carriers_even(space, blocks, strategy)
    partition = SpreadPartition(fp, blocks, carriers, groups)
    logger.info(
        f"スプレッド分割を構成しました: ケース={fp.case.value}, B={fp.num_blocks}, "
        f"キャリア次元={carriers[0].dim}, 同変={partition.is_equivariant}"
    )
    return partition


# --- 次数プロファイル ---

def _profile_from_counts(per_round: np.ndarray, owners: np.ndarray, reference_row: int) -> DegreeProfile:
    reference = per_round[reference_row]
    mismatch = np.argwhere(per_round != reference[None, :])
    deviations = tuple(
        (int(owners[v]), int(v), int(j), int(per_round[v, j])) for v, j in mismatch
    )
    return DegreeProfile(
        d=tuple(int(x) for x in reference),
        round_lengths=tuple(int(x) for x in per_round.max(axis=0)),
        deviations=deviations,
    )


def _rotated_counts(matrix: np.ndarray, owner_rows: np.ndarray, owner_cols: np.ndarray, B: int) -> np.ndarray:
    onehot = np.zeros((matrix.shape[1], B), dtype=np.int64)
    onehot[np.arange(matrix.shape[1]), owner_cols] = 1
    counts = matrix.astype(np.int64) @ onehot
    rounds = (owner_rows[:, None] + np.arange(B)[None, :]) % B
    return counts[np.arange(matrix.shape[0])[:, None], rounds]


def degree_profile(
    space: ProjectiveSpace,
    blocks: Sequence[Flat],
    carriers: Sequence[Flat],
    hyperplane_blocks: Optional[Sequence[Sequence[int]]] = None,
) -> DegreeProfile:
    """
    各点について、ラウンド j で超平面グループ (i+j) mod B から接続される超平面数を数える。
    全ての点で一致すれば deviations は空になる。
    """
    B = len(blocks)
    if hyperplane_blocks is None:
        hyperplane_blocks = [space.hyperplanes_containing(c.points) for c in carriers]
    partition = SpreadPartition(FoldParams.for_space(space, blocks[0].dim), tuple(blocks), tuple(carriers),
                                tuple(tuple(g) for g in hyperplane_blocks))
    point_owner = partition.block_of_point(space.N)
    group_owner = partition.group_of_hyperplane(space.N)
    per_round = _rotated_counts(space.incidence_matrix, point_owner, group_owner, B)
    profile = _profile_from_counts(per_round, point_owner, blocks[0].points[0])
    if not profile.uniform:
        logger.warning(f"次数プロファイルが一様ではありません: 逸脱 {len(profile.deviations)} 件")
    return profile


def dual_degree_profile(space: ProjectiveSpace, partition: SpreadPartition) -> DegreeProfile:
    """双対側: グループ i の超平面がブロック (i+j) mod B の点をいくつ含むか。"""
    point_owner = partition.block_of_point(space.N)
    group_owner = partition.group_of_hyperplane(space.N)
    per_round = _rotated_counts(space.incidence_matrix.T, group_owner, point_owner, partition.num_blocks)
    return _profile_from_counts(per_round, group_owner, partition.hyperplane_blocks[0][0])


# --- 補題の検証 ---

@dataclass(frozen=True)
class LemmaResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    witnesses: Tuple[Any, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name, 'passed': self.passed, 'checked': self.checked,
            'detail': self.detail, 'witnesses': [list(w) if isinstance(w, tuple) else w for w in self.witnesses],
        }


@dataclass(frozen=True)
class SpreadReport:
    results: Tuple[LemmaResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> LemmaResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'lemmas': [r.to_dict() for r in self.results]}


_MAX_WITNESSES = 5


def _result(name: str, failures: List[Any], checked: int, detail: str) -> LemmaResult:
    return LemmaResult(name, not failures, checked, detail, tuple(failures[:_MAX_WITNESSES]))


def verify_spread_lemmas(space: ProjectiveSpace, partition: SpreadPartition) -> SpreadReport:
    """
    スケジュールが依存する構造的性質を網羅的に検証する。失敗しても例外は投げず、証拠付きで報告する。
    """
    fp = partition.params
    B, N, q, k, t = fp.num_blocks, space.N, fp.q, fp.k, fp.t
    blocks, carriers, groups = partition.blocks, partition.carriers, partition.hyperplane_blocks
    matrix = space.incidence_matrix
    results = []

    # 点のスプレッド: 互いに素で全点を被覆する
    owner_count = np.zeros(N, dtype=np.int64)
    for block in blocks:
        owner_count[list(block.points)] += 1
    failures = [int(x) for x in np.nonzero(owner_count != 1)[0]]
    results.append(_result('disjoint_cover', failures, N, "各点はちょうど1つのブロックに属する"))

    # 閉包: S_i と T_i はspanで不変
    failures = [('block', i) for i, b in enumerate(blocks) if space.span(b.points).points != b.points]
    failures += [('carrier', i) for i, c in enumerate(carriers) if space.span(c.points).points != c.points]
    results.append(_result('closure', failures, 2 * B, "ブロックとキャリアはspanの不動点"))

    # α倍でブロックが巡回する
    failures = [i for i, b in enumerate(blocks) if space.shift(b, 1).points != blocks[(i + 1) % B].points]
    results.append(_result('block_shift', failures, B, "α·S_i = S_(i+1 mod B)"))

    # キャリア外の点はグループ i の超平面のうち (q^k - 1)/(q - 1) 個に含まれる
    off_expected = points_in(k, q)
    failures, checked = [], 0
    for i, (carrier, group) in enumerate(zip(carriers, groups)):
        counts = matrix[:, list(group)].sum(axis=1)
        inside = np.zeros(N, dtype=bool)
        inside[list(carrier.points)] = True
        checked += N
        for x in np.nonzero(inside & (counts != len(group)))[0]:
            failures.append((i, int(x), int(counts[x])))
        for x in np.nonzero(~inside & (counts != off_expected))[0]:
            failures.append((i, int(x), int(counts[x])))
    results.append(_result('off_carrier_incidence', failures, checked,
                           f"T_i 外の点はグループ i の超平面 {off_expected} 個に含まれる"))

    # 各ブロックは各キャリアに含まれるか、交わらない
    failures = [
        (j, i) for i, carrier in enumerate(carriers) for j, block in enumerate(blocks)
        if not (block.issubset(carrier) or block.isdisjoint(carrier))
    ]
    results.append(_result('inside_or_disjoint', failures, B * B, "S_j ⊆ T_i または S_j ∩ T_i = ∅"))

    # 固定ブロックと他ブロックの和の相異なるspanの個数
    Q = fp.subfield_order
    expected_spans = (Q ** (t - 1) - 1) // (Q - 1)
    failures = []
    for i, block in enumerate(blocks):
        spans = {space.join(block, other).points for j, other in enumerate(blocks) if j != i}
        if len(spans) != expected_spans:
            failures.append((i, len(spans)))
    results.append(_result('block_pair_spans', failures, B, f"各ブロックについて相異なるspanは {expected_spans} 個"))

    # 相異なるキャリアの交わりはベクトル次元 (t-2)(k+1)
    meet = points_in((t - 2) * (k + 1), q)
    failures = [
        (a, b, len(carriers[a].point_set & carriers[b].point_set))
        for a, b in itertools.combinations(range(B), 2)
        if len(carriers[a].point_set & carriers[b].point_set) != meet
    ]
    results.append(_result('carrier_intersections', failures, B * (B - 1) // 2,
                           f"|T_a ∩ T_b| = {meet}"))

    # グループ i の超平面数 = ブロックの点数
    failures = [(i, len(g)) for i, g in enumerate(groups) if len(g) != fp.points_per_block]
    results.append(_result('group_size', failures, B, f"|グループ i| = {fp.points_per_block}"))

    # 各ブロックを含む超平面の数
    through_block = space.hyperplanes_through_count(k + 1)
    failures = [(i, n) for i, n in
                ((i, len(space.hyperplanes_containing(b.points))) for i, b in enumerate(blocks))
                if n != through_block]
    results.append(_result('hyperplanes_through_block', failures, B, f"S_i を含む超平面は {through_block} 個"))

    # 各ブロックを含むキャリアの数
    failures = []
    for j, block in enumerate(blocks):
        n = sum(1 for c in carriers if block.issubset(c))
        if n != fp.carriers_per_block:
            failures.append((j, n))
    results.append(_result('carriers_per_block', failures, B, f"S_i を含むキャリアは {fp.carriers_per_block} 個"))

    # 次数の恒等式
    local = points_in(fp.m - fp.k, q)
    remote = points_in(k, q)
    lhs = local + remote * (B - fp.carriers_per_block)
    rhs = space.degree
    failures = [] if lhs == rhs else [(lhs, rhs)]
    results.append(_result('degree_identity', failures, 1,
                           f"{local} + {remote}·({B}-{fp.carriers_per_block}) = {rhs}"))

    # 次数プロファイル（点側・超平面側）
    profile = degree_profile(space, blocks, carriers, groups)
    failures = list(profile.deviations)
    if profile.total != space.degree:
        failures.append(('sum', profile.total))
    results.append(_result('degree_profile', failures, N * B, f"d = {list(profile.d)}"))

    dual = dual_degree_profile(space, partition)
    failures = list(dual.deviations)
    if dual.total != space.degree:
        failures.append(('sum', dual.total))
    results.append(_result('dual_degree_profile', failures, N * B, f"d* = {list(dual.d)}"))

    report = SpreadReport(tuple(results))
    logger.info(f"補題検証: {sum(r.passed for r in results)}/{len(results)} 合格")
    return report
