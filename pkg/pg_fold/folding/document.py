# /pg_fold/folding/document.py
# タイトル: Plan Document Schema and Canonical JSON
# 役割: FoldPlan と plan.json の相互変換を行う。pydanticで厳密に検証し、正準形JSON（キー順固定・整数のみ）で出力する。

import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import PlanError
from ..geometry.enums import CarrierStrategy
from ..geometry.partition import DegreeProfile, FoldParams, SpreadPartition
from ..geometry.projective import Flat, ProjParams, build_space, incidence_graph
from ..utils.helper_functions import canonical_dumps
from .plan import (
    FoldPlan, MemoryMap, Phase1Schedule, Phase1Slot, Phase2Schedule, Phase2Task, PlanParams,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "pgfold-plan/1"


class _Strict(BaseModel):
    model_config = ConfigDict(strict=True, extra='forbid', frozen=True)


class ParamsModel(_Strict):
    m: int
    q: int
    k: int
    poly: List[int]
    strategy: Literal["equivariant", "matching"]
    overlap: bool


class MemoriesModel(_Strict):
    count: int = Field(ge=1)
    size: int = Field(ge=1)


class PartitionModel(_Strict):
    blocks: List[List[int]]
    carriers: List[List[int]]
    hyperplane_blocks: List[List[int]]


class PlanDocument(_Strict):
    """plan.json のスキーマ。"""
    model_config = ConfigDict(strict=True, extra='forbid', frozen=True, populate_by_name=True)

    schema_version: Literal["pgfold-plan/1"] = Field(SCHEMA_VERSION, alias='schema')
    params: ParamsModel
    memories: MemoriesModel
    partition: PartitionModel
    degree_profile: List[int]
    round_lengths: List[int]
    idle_slots: int
    memory_map: List[Tuple[int, int, int, int]]
    phase1: List[List[Tuple[int, int, int]]]
    phase2: List[List[Tuple[int, List[int]]]]


def _error_path(exc: ValidationError) -> str:
    first = exc.errors()[0]
    return '.'.join(str(part) for part in first['loc']) or '<root>'


def to_document(plan: FoldPlan) -> PlanDocument:
    part = plan.partition
    return PlanDocument(
        schema=SCHEMA_VERSION,
        params=ParamsModel(**plan.params.to_dict()),
        memories=MemoriesModel(count=plan.memory_map.num_memories, size=plan.memory_map.mem_size),
        partition=PartitionModel(
            blocks=[list(b.points) for b in part.blocks],
            carriers=[list(c.points) for c in part.carriers],
            hyperplane_blocks=[list(g) for g in part.hyperplane_blocks],
        ),
        degree_profile=list(plan.profile.d),
        round_lengths=list(plan.profile.round_lengths),
        idle_slots=plan.phase1.idle_slots,
        memory_map=[tuple(e) for e in plan.memory_map.entries],
        phase1=[[(s.slot, s.mem, s.addr) for s in slots] for slots in plan.phase1.units],
        phase2=[[(t.hyperplane, list(t.addrs)) for t in tasks] for tasks in plan.phase2.units],
    )


def canonical_json(doc: PlanDocument) -> str:
    """キー順固定・空白なし・末尾改行の正準形。"""
    return canonical_dumps(doc.model_dump(mode='json', by_alias=True))


def parse_document(text: Union[str, bytes]) -> PlanDocument:
    """plan.json を検証して読み込む。スキーマ違反は違反箇所のパスを持つ PlanError になる。"""
    try:
        return PlanDocument.model_validate_json(text)
    except ValidationError as e:
        path = _error_path(e)
        raise PlanError(
            f"計画ファイルがスキーマ {SCHEMA_VERSION} に適合しません: {path}: {e.errors()[0]['msg']}",
            path=path
        ) from e


def load_document(path: Union[str, Path]) -> PlanDocument:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise PlanError(f"計画ファイルを読み込めません: {e}", file=str(path)) from e
    return parse_document(text)


def save_document(doc: PlanDocument, path: Union[str, Path]) -> None:
    try:
        Path(path).write_text(canonical_json(doc), encoding='utf-8')
    except OSError as e:
        raise PlanError(f"計画ファイルを書き込めません: {e}", file=str(path)) from e
    logger.info(f"計画ファイルを書き出しました: {path}")


def from_document(doc: PlanDocument) -> FoldPlan:
    """
    文書から FoldPlan を復元する。幾何（体・射影空間・接続グラフ）はパラメータから再構成し、
    配置とスケジュールは文書の内容をそのまま使う（整合性の検証は check_plan が行う）。
    """
    p = doc.params
    space = build_space(ProjParams(p.m, p.q, tuple(p.poly)))
    fp = FoldParams.for_space(space, p.k)
    blocks = tuple(Flat(fp.k, tuple(points)) for points in doc.partition.blocks)
    carriers = tuple(Flat(fp.carrier_dim, tuple(points)) for points in doc.partition.carriers)
    partition = SpreadPartition(
        fp, blocks, carriers, tuple(tuple(g) for g in doc.partition.hyperplane_blocks)
    )
    profile = DegreeProfile(tuple(doc.degree_profile), tuple(doc.round_lengths))
    memory_map = MemoryMap(doc.memories.count, doc.memories.size, tuple(tuple(e) for e in doc.memory_map))
    phase1 = Phase1Schedule(
        tuple(tuple(Phase1Slot(*s) for s in slots) for slots in doc.phase1),
        tuple(doc.round_lengths), fp.points_per_block, p.overlap,
    )
    graph = incidence_graph(space)
    phase2 = Phase2Schedule(
        tuple(tuple(Phase2Task(h, tuple(addrs)) for h, addrs in tasks) for tasks in doc.phase2),
        graph.degree, p.overlap,
    )
    params = PlanParams(p.m, p.q, p.k, tuple(p.poly), CarrierStrategy(p.strategy), p.overlap)
    return FoldPlan(params, partition, profile, memory_map, phase1, phase2, space, graph)


def _reload(data: dict) -> PlanDocument:
    return parse_document(json.dumps(data))


def swap_edge_memory(doc: PlanDocument, seed: Optional[int] = None) -> Tuple[PlanDocument, dict]:
    """ランダムな1辺の所属メモリを別のメモリに書き換える（故障注入）。"""
    rng = np.random.default_rng(seed)
    data = doc.model_dump(mode='json', by_alias=True)
    count = data['memories']['count']
    if count < 2:
        raise PlanError("メモリが1つしかないため所属メモリを入れ替えられません。")
    idx = int(rng.integers(len(data['memory_map'])))
    p, h, mem, addr = data['memory_map'][idx]
    new_mem = (mem + int(rng.integers(1, count))) % count
    data['memory_map'][idx] = [p, h, new_mem, addr]
    fault = {'kind': 'edge_memory', 'edge': [p, h], 'from': mem, 'to': new_mem}
    logger.debug(f"故障注入: {fault}")
    return _reload(data), fault


def swap_unit_slots(doc: PlanDocument, seed: Optional[int] = None) -> Tuple[PlanDocument, dict]:
    """ランダムな1ユニットのフェーズ1の2スロットのアクセス先を入れ替える（故障注入）。"""
    rng = np.random.default_rng(seed)
    data = doc.model_dump(mode='json', by_alias=True)
    candidates = [u for u, slots in enumerate(data['phase1']) if len(slots) >= 2]
    if not candidates:
        raise PlanError("2スロット以上を持つユニットがありません。")
    unit = int(rng.choice(candidates))
    slots = data['phase1'][unit]
    a, b = (int(i) for i in rng.choice(len(slots), size=2, replace=False))
    (sa, ma, aa), (sb, mb, ab) = slots[a], slots[b]
    slots[a], slots[b] = [sa, mb, ab], [sb, ma, aa]
    fault = {'kind': 'unit_slots', 'unit': unit, 'slots': [sa, sb]}
    logger.debug(f"故障注入: {fault}")
    return _reload(data), fault
