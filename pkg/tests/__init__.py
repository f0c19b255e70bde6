# /tests/__init__.py
# このファイルは `tests` ディレクトリをPythonパッケージとして認識させるために存在します。