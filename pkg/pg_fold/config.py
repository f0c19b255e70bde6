# /pg_fold/config.py
# タイトル: Centralized Settings Management
# 役割: 体のサイズ上限、シミュレーションの既定値、キャリア割当戦略などを一元管理する。

from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    """
    プロジェクト全体の設定を管理するクラス。
    """
    model_config = SettingsConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore'
    )

    # --- Galois Field ---
    # 指数表・対数表をメモリに保持できる体の位数の上限
    FIELD_SIZE_BOUND: int = 2 ** 20

    # --- Partition / Folding ---
    CARRIER_STRATEGY: str = "equivariant"
    OVERLAP_WRITEBACK: bool = False

    # --- Simulation Defaults ---
    XOR_WORD_WIDTH: int = 16
    DEFAULT_SEED: int = 42
    DEFAULT_ITERS: int = 1

    # --- Logging ---
    LOG_LEVEL: str = "INFO"


settings = Settings()
