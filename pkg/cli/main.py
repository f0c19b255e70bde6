# /cli/main.py
# タイトル: CLI main entrypoint
# 役割: CLIのエントリーポイントと引数解析。設定を検証してからハンドラに処理を委譲し、
#       エラーは機械可読なJSONオブジェクトとして標準エラーに出力する。

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from pg_fold import setup_logging
from pg_fold.errors import PGFoldError, UsageError
from pg_fold.folding import SCHEMA_VERSION
from pg_fold.utils.helper_functions import format_json_output
from cli.handler import PGFoldCLI, RunConfig, check_failure, render_text

logger = logging.getLogger(__name__)

EPILOG = f"""計画ファイル (plan.json) のスキーマ: {SCHEMA_VERSION}
  {{schema, params:{{m,q,k,poly,strategy,overlap}}, memories:{{count,size}},
   partition:{{blocks,carriers,hyperplane_blocks}}, degree_profile, round_lengths, idle_slots,
   memory_map:[[point,hyperplane,mem,addr]...], phase1:[unit→[[slot,mem,addr]...]],
   phase2:[unit→[[hyperplane,[addr...]]...]]}}
"""


class _Parser(argparse.ArgumentParser):
    """引数エラーを UsageError として送出する。"""

    def error(self, message):
        raise UsageError(f"引数エラー: {message}", usage=self.format_usage().strip())


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"整数のカンマ区切りが必要です: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", dest="json_output", action="store_true", help="JSON出力")
    common.add_argument("--log-level", help="ログレベル (DEBUG, INFO, WARNING, ...)")

    geometry = _Parser(add_help=False)
    geometry.add_argument("--m", type=int, help="射影次元 m")
    geometry.add_argument("--q", type=int, help="基礎体の位数 q (素数冪)")
    geometry.add_argument("--poly", type=_int_list, help="GF(q^(m+1)) の原始多項式（先頭係数から、カンマ区切り）")

    folding = _Parser(add_help=False)
    folding.add_argument("--block-dim", dest="block_dim", type=int, help="ブロックの射影次元 k（k+1 が m+1 を割り切ること）")
    folding.add_argument("--strategy", choices=['equivariant', 'matching'], help="キャリアの割当戦略")

    parser = _Parser(
        prog="pgfold",
        description="射影幾何グラフの衝突なしフォールディングの生成・検証・シミュレーション",
        epilog=EPILOG,
        formatter_class=argparse.RawTextHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_field = sub.add_parser("field", parents=[common], help="有限体 GF(p^e) の指数表をCSVで表示")
    p_field.add_argument("--p", type=int, help="素数 p")
    p_field.add_argument("--e", type=int, help="拡大次数 e")
    p_field.add_argument("--poly", type=_int_list, help="原始多項式（先頭係数から、カンマ区切り）")

    p_geo = sub.add_parser("geometry", parents=[common, geometry], help="射影空間の濃度を表示")
    p_geo.add_argument("--dump", help="接続辺 (point_index, hyperplane_index) の書き出し先 (CSV)")

    p_part = sub.add_parser("partition", parents=[common, geometry, folding], help="スプレッド分割と補題検証")
    p_part.add_argument("--out", help="分割の書き出し先 (JSON)")

    p_sched = sub.add_parser("schedule", parents=[common, geometry, folding], help="フォールディング計画を生成")
    p_sched.add_argument("--out", help="plan.json の書き出し先")
    p_sched.add_argument("--overlap", action="store_true", default=None, help="書き戻しと次の読み出しを重ねる")

    p_verify = sub.add_parser("verify", parents=[common], help="計画を静的に検証")
    p_verify.add_argument("plan", help="plan.json")

    p_sim = sub.add_parser("simulate", parents=[common], help="計画を実行し参照実行と比較")
    p_sim.add_argument("plan", help="plan.json")
    p_sim.add_argument("--kernel", help="xor | sum（更新規則を付ける場合は xor-add など）")
    p_sim.add_argument("--width", type=int, help="xor カーネルの語長")
    p_sim.add_argument("--seed", type=int, help="初期状態の乱数シード")
    p_sim.add_argument("--iters", type=int, help="反復回数")
    p_sim.add_argument("--trace", help="アクセストレースの書き出し先 (CSV)")

    p_phi = sub.add_parser("phi", parents=[common], help="φ(n, l, s) を計算")
    p_phi.add_argument("n", type=int)
    p_phi.add_argument("l", type=int)
    p_phi.add_argument("s", type=int)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    values = dict(vars(args))
    values.pop('log_level', None)
    if args.command == 'phi':
        values['phi_args'] = (values.pop('n'), values.pop('l'), values.pop('s'))
    return RunConfig.from_args(**values)


def _print_error(err: PGFoldError):
    print(json.dumps({'error': err.to_dict()}, ensure_ascii=False, default=str), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        setup_logging(getattr(args, 'log_level', None))
        if not args.command:
            parser.print_help()
            return 2
        config = _config_from_args(args)
        cli = PGFoldCLI()
        status, result = cli.dispatch(config)
        print(format_json_output(result) if config.json_output else render_text(config.command, result))
        if status:
            _print_error(check_failure(config.command, result))
        return status
    except UsageError as e:
        logger.error(f"使用法エラー: {e}")
        _print_error(e)
        return 2
    except PGFoldError as e:
        logger.error(f"{e.__class__.__name__}: {e}")
        _print_error(e)
        return 1
    except KeyboardInterrupt:
        print("\n中断されました。", file=sys.stderr)
        return 130
    except Exception as e:
        logger.critical(f"予期しない致命的エラー: {e}", exc_info=True)
        print(json.dumps({'error': {'type': e.__class__.__name__, 'message': str(e)}}, ensure_ascii=False),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
