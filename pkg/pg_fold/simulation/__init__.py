# /pg_fold/simulation/__init__.py
"""
フォールディング計画の実行・参照実行・静的検証
"""
from .checker import CheckResult, PlanReport, check_plan
from .enums import AccessOp, Phase, UpdateRule
from .kernels import Kernel, get_kernel, list_kernels
from .simulator import random_edge_state, run_folded, run_reference
from .tracker import EdgeState, SimTrace, TraceRecord

__all__ = [
    "CheckResult",
    "PlanReport",
    "check_plan",
    "AccessOp",
    "Phase",
    "UpdateRule",
    "Kernel",
    "get_kernel",
    "list_kernels",
    "random_edge_state",
    "run_folded",
    "run_reference",
    "EdgeState",
    "SimTrace",
    "TraceRecord",
]
