# /cli/handler.py
"""
CLIのコアロジックを担うハンドラクラス
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from pg_fold.config import settings
from pg_fold.errors import CheckFailedError, UsageError
from pg_fold.folding import fold_plan, from_document, load_document, save_document, to_document, SCHEMA_VERSION
from pg_fold.geometry import (
    CarrierStrategy, ProjParams, build_partition, build_space, dual_degree_profile, field_from, incidence_graph, phi,
    verify_spread_lemmas,
)
from pg_fold.geometry.partition import degree_profile
from pg_fold.simulation import (
    UpdateRule, check_plan, get_kernel, list_kernels, random_edge_state, run_folded, run_reference,
)
from pg_fold.utils.helper_functions import format_csv, write_csv_rows, write_json

logger = logging.getLogger(__name__)

Command = Literal['field', 'geometry', 'partition', 'schedule', 'verify', 'simulate', 'phi']

# サブコマンドごとの必須項目
_REQUIRED = {
    'field': ('p', 'e'),
    'geometry': ('m', 'q'),
    'partition': ('m', 'q', 'block_dim'),
    'schedule': ('m', 'q', 'block_dim'),
    'verify': ('plan',),
    'simulate': ('plan',),
    'phi': ('phi_args',),
}


class RunConfig(BaseModel):
    """1回の起動の完全な設定。計算を始める前に検証する。"""
    model_config = ConfigDict(extra='forbid')

    command: Command
    p: Optional[int] = Field(None, ge=2)
    e: Optional[int] = Field(None, ge=1)
    m: Optional[int] = Field(None, ge=1)
    q: Optional[int] = Field(None, ge=2)
    block_dim: Optional[int] = Field(None, ge=0)
    poly: Optional[Tuple[int, ...]] = None
    strategy: CarrierStrategy = Field(default_factory=lambda: CarrierStrategy(settings.CARRIER_STRATEGY))
    overlap: bool = Field(default_factory=lambda: settings.OVERLAP_WRITEBACK)
    out: Optional[Path] = None
    plan: Optional[Path] = None
    trace: Optional[Path] = None
    kernel: str = 'xor'
    width: int = Field(default_factory=lambda: settings.XOR_WORD_WIDTH, ge=1, le=64)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    iters: int = Field(default_factory=lambda: settings.DEFAULT_ITERS, ge=0)
    phi_args: Optional[Tuple[int, int, int]] = None
    dump: Optional[Path] = None
    json_output: bool = False

    @model_validator(mode='after')
    def _check_combination(self) -> 'RunConfig':
        missing = [name for name in _REQUIRED[self.command] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"サブコマンド '{self.command}' には {', '.join(missing)} の指定が必要です。")
        if self.command in ('partition', 'schedule') and self.block_dim >= self.m:
            raise ValueError(f"--block-dim {self.block_dim} は m={self.m} 未満が必要です。")
        if self.command == 'simulate':
            base, _, rule = self.kernel.partition('-')
            if base not in list_kernels() or (rule and rule not in [r.value for r in UpdateRule]):
                raise ValueError(f"カーネル '{self.kernel}' は不正です。利用可能: {list_kernels()} (更新規則 -assign / -add)")
        return self

    @classmethod
    def from_args(cls, **kwargs) -> 'RunConfig':
        try:
            return cls(**{k: v for k, v in kwargs.items() if v is not None})
        except ValidationError as e:
            first = e.errors()[0]
            path = '.'.join(str(part) for part in first['loc']) or 'config'
            raise UsageError(f"設定が不正です: {path}: {first['msg']}", path=path) from None


class PGFoldCLI:
    def __init__(self):
        self.handlers = {
            'field': self.run_field,
            'geometry': self.run_geometry,
            'partition': self.run_partition,
            'schedule': self.run_schedule,
            'verify': self.run_verify,
            'simulate': self.run_simulate,
            'phi': self.run_phi,
        }

    def dispatch(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        """サブコマンドを実行し、(終了コード, 結果) を返す。"""
        logger.info(f"サブコマンド '{config.command}' を実行します。")
        return self.handlers[config.command](config)

    def run_phi(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        n, l, s = config.phi_args
        return 0, {'n': n, 'l': l, 's': s, 'value': phi(n, l, s)}

    def run_field(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        field_ = field_from(config.p, config.e, config.poly)
        powers = [list(field_.coefficients(int(code))) for code in field_.exp_table]
        return 0, {
            'p': field_.p, 'e': field_.e, 'order': field_.order,
            'poly': list(field_.spec.poly), 'poly_str': field_.spec.poly_str(),
            'powers': powers,
        }

    def run_geometry(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        space = build_space(ProjParams(config.m, config.q, config.poly))
        m, q = space.m, space.q
        result = {
            'space': repr(space),
            'poly': list(space.field.spec.poly),
            'points': space.N,
            'hyperplanes': space.N,
            'degree': space.degree,
            'flats': {str(d): phi(m, d, q) for d in range(m)},
            'hyperplanes_through': {str(d): space.hyperplanes_through_count(d + 1) for d in range(m)},
        }
        if config.dump:
            graph = incidence_graph(space)
            write_csv_rows(config.dump, ('point_index', 'hyperplane_index'), graph.edges)
            logger.info(f"接続辺 {len(graph.edges)} 本を書き出しました: {config.dump}")
            result['dump'] = str(config.dump)
            result['edges'] = len(graph.edges)
        return 0, result

    def run_partition(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        space = build_space(ProjParams(config.m, config.q, config.poly))
        partition = build_partition(space, config.block_dim, config.strategy)
        profile = degree_profile(space, partition.blocks, partition.carriers, partition.hyperplane_blocks)
        dual = dual_degree_profile(space, partition)
        report = verify_spread_lemmas(space, partition)
        artifact = {
            'params': partition.params.to_dict(),
            'blocks': [list(b.points) for b in partition.blocks],
            'carriers': [list(c.points) for c in partition.carriers],
            'hyperplane_blocks': [list(g) for g in partition.hyperplane_blocks],
            'degree_profile': list(profile.d),
        }
        if config.out:
            write_json(config.out, artifact)
            logger.info(f"分割を書き出しました: {config.out}")
        result = {
            'params': artifact['params'],
            'equivariant': partition.is_equivariant,
            'degree_profile': list(profile.d),
            'dual_degree_profile': list(dual.d),
            'lemmas': report.to_dict(),
        }
        return (0 if report.passed else 1), result

    def run_schedule(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        plan = fold_plan(config.m, config.q, config.block_dim, config.poly, config.strategy, config.overlap)
        if config.out:
            save_document(to_document(plan), config.out)
        result = plan.summary()
        result['schema'] = SCHEMA_VERSION
        if config.out:
            result['out'] = str(config.out)
        return 0, result

    def run_verify(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        plan = from_document(load_document(config.plan))
        report = check_plan(plan)
        result = {
            'passed': report.passed,
            'memories': plan.memory_map.num_memories,
            'memory_size': plan.memory_map.mem_size,
            'report': report.to_dict(),
        }
        return (0 if report.passed else 1), result

    def run_simulate(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        plan = from_document(load_document(config.plan))
        options = {'width': config.width} if config.kernel.startswith('xor') else {}
        kernel = get_kernel(config.kernel, **options)
        init = random_edge_state(plan.graph, kernel, config.seed)

        final, trace = run_folded(plan, kernel, init, config.iters, keep_trace=config.trace is not None, seed=config.seed)
        expected = run_reference(plan.graph, kernel, init, config.iters)
        equivalent = final == expected
        if config.trace:
            trace.write_csv(config.trace)
            logger.info(f"トレースを書き出しました: {config.trace}")
        if not equivalent:
            logger.error(f"参照実行との不一致: {len(final.mismatches(expected))} 辺")

        result = {
            'kernel': repr(kernel),
            'seed': config.seed,
            'iters': config.iters,
            'equivalent': equivalent,
            'mismatched_edges': len(final.mismatches(expected)),
            'trace': trace.summary(),
        }
        return (0 if equivalent else 1), result


def check_failure(command: str, result: Dict[str, Any]) -> CheckFailedError:
    """終了コード1の結果を標準エラー用の例外にまとめる。"""
    if command == 'verify':
        failed = [c['name'] for c in result['report']['checks'] if not c['passed']]
        return CheckFailedError(f"静的検証に失敗しました: {', '.join(failed)}", failed=failed)
    if command == 'partition':
        failed = [r['name'] for r in result['lemmas']['lemmas'] if not r['passed']]
        return CheckFailedError(f"補題検証に失敗しました: {', '.join(failed)}", failed=failed)
    return CheckFailedError(
        f"参照実行と {result['mismatched_edges']} 辺で一致しません。",
        mismatched_edges=result['mismatched_edges'], seed=result['seed'], iters=result['iters'],
    )


def render_text(command: str, result: Dict[str, Any]) -> str:
    """人が読むための出力。--json 指定時は使わない。"""
    if command == 'phi':
        return str(result['value'])
    if command == 'field':
        e = result['e']
        header = ['exponent'] + [f"c{d}" for d in range(e - 1, -1, -1)]
        return format_csv(header, ([i] + coeffs for i, coeffs in enumerate(result['powers'])))
    if command == 'verify':
        if result['passed']:
            return f"all checks pass ({len(result['report']['checks'])} checks), {result['memories']} memories"
        failed = [c['name'] for c in result['report']['checks'] if not c['passed']]
        return f"checks failed: {', '.join(failed)}"
    lines = []
    for key, value in result.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False, separators=(',', ':'))
        lines.append(f"{key}: {value}")
    return '\n'.join(lines)
