# /pg_fold/__init__.py
# タイトル: PGFold 射影幾何フォールディング・ツールキット
# 役割: パッケージの初期化とロギング設定を行う。設定読み込みはconfigモジュールに委譲。

__version__ = "1.0.0"
__author__ = "PGFold Project"
__description__ = "PGFold - 射影幾何グラフの衝突なしフォールディング生成・検証ツール"

import logging
import os
from pg_fold.config import settings

# ロギング設定
def setup_logging(level: str = None):
    """ロギングの設定"""
    log_level_str = (level or os.getenv("LOG_LEVEL", settings.LOG_LEVEL)).upper()
    log_level = getattr(logging, log_level_str, logging.INFO)

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # PGFold特有のロガー
    pg_logger = logging.getLogger('pg_fold')
    pg_logger.setLevel(log_level)

# モジュール初期化時にロギングを設定
setup_logging()
