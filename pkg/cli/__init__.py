# /cli/__init__.py
# このファイルは `cli` ディレクトリをPythonパッケージとして認識させるために存在します。