# /pg_fold/utils/helper_functions.py
import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO, Union

def format_json_output(data: Any) -> str:
    """辞書データを整形されたJSON文字列に変換する"""
    return json.dumps(data, indent=2, ensure_ascii=False)

def canonical_dumps(data: Any) -> str:
    """キー順固定・空白なし・末尾改行のJSON文字列。同じ入力からは常に同じバイト列になる。"""
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False) + '\n'

def write_json(path: Union[str, Path], data: Any):
    Path(path).write_text(canonical_dumps(data), encoding='utf-8')

def _write_rows(f: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)

def write_csv_rows(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        _write_rows(f, header, rows)

def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """ヘッダ付きCSVを文字列で返す（末尾改行なし）。"""
    buf = io.StringIO()
    _write_rows(buf, header, rows)
    return buf.getvalue().rstrip('\n')
