# /pg_fold/errors.py
# タイトル: PGFold Exception Hierarchy
# 役割: ライブラリ全体で使う例外を定義する。CLIはto_dict()の結果をそのままJSONで出力する。

from typing import Any, Dict


class PGFoldError(Exception):
    """PGFoldの全ての例外の基底クラス。詳細情報はキーワード引数で保持する。"""

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        payload = {'type': self.__class__.__name__, 'message': self.message}
        payload.update(self.details)
        return payload


class FieldConstructionError(PGFoldError, ValueError):
    """有限体の構成に失敗した（素数でない p、原始的でない多項式など）。"""


class FieldDomainError(PGFoldError, ArithmeticError):
    """体演算の定義域外の操作（ゼロの逆元など）。"""


class GeometryError(PGFoldError, ValueError):
    """射影空間のパラメータが不正。"""


class PartitionError(PGFoldError, ValueError):
    """スプレッド分割・キャリア構成の失敗。"""


class PlanError(PGFoldError, ValueError):
    """フォールディング計画の不整合、またはスキーマ違反の計画ファイル。"""


class ScheduleConflictError(PGFoldError, RuntimeError):
    """シミュレーション中に検出されたメモリアクセス衝突・二重読み出し。"""


class UsageError(PGFoldError, ValueError):
    """コマンドライン引数・実行設定の検証エラー（CLIは終了コード2を返す）。"""


class CheckFailedError(PGFoldError):
    """検証（補題・静的検査・参照実行との比較）が不合格。CLIは終了コード1を返す。"""
