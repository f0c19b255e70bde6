# /pg_fold/folding/__init__.py
"""
フォールディング計画の構成と plan.json の入出力
"""
from .document import (
    SCHEMA_VERSION, PlanDocument, canonical_json, from_document, load_document,
    parse_document, save_document, swap_edge_memory, swap_unit_slots, to_document,
)
from .plan import (
    AddressGen, FoldPlan, MemoryMap, Phase1Schedule, Phase1Slot, Phase2Schedule, Phase2Task,
    PlanParams, build_memory_map, build_phase1_schedule, build_phase2_schedule, fold_plan,
)

__all__ = [
    "AddressGen",
    "FoldPlan",
    "MemoryMap",
    "Phase1Schedule",
    "Phase1Slot",
    "Phase2Schedule",
    "Phase2Task",
    "PlanParams",
    "build_memory_map",
    "build_phase1_schedule",
    "build_phase2_schedule",
    "fold_plan",
    "SCHEMA_VERSION",
    "PlanDocument",
    "canonical_json",
    "from_document",
    "load_document",
    "parse_document",
    "save_document",
    "swap_edge_memory",
    "swap_unit_slots",
    "to_document",
]
