# /pg_fold/utils/__init__.py
"""
pg_fold/utils パッケージ
"""
from .access_monitor import AccessMonitor
from .helper_functions import canonical_dumps, format_json_output, write_csv_rows, write_json

__all__ = [
    "AccessMonitor",
    "canonical_dumps",
    "format_json_output",
    "write_csv_rows",
    "write_json",
]
