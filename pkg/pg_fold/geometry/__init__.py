# /pg_fold/geometry/__init__.py
"""
有限体・射影空間・スプレッド分割
"""
from .enums import CarrierStrategy, FoldCase
from .galois import FieldElement, FieldSpec, FiniteField, build_field, default_primitive_poly, field_from
from .partition import (
    DegreeProfile, FoldParams, SpreadPartition, SpreadReport, build_carriers_even, build_carriers_odd,
    build_partition, coset_point_partition, degree_profile, dual_degree_profile, verify_spread_lemmas,
)
from .projective import (
    Flat, Hyperplane, IncidenceGraph, ProjParams, ProjPoint, ProjectiveSpace,
    build_space, incidence_graph, phi,
)

__all__ = [
    "CarrierStrategy",
    "FoldCase",
    "FieldElement",
    "FieldSpec",
    "FiniteField",
    "build_field",
    "default_primitive_poly",
    "field_from",
    "DegreeProfile",
    "FoldParams",
    "SpreadPartition",
    "SpreadReport",
    "build_carriers_even",
    "build_carriers_odd",
    "build_partition",
    "coset_point_partition",
    "degree_profile",
    "dual_degree_profile",
    "verify_spread_lemmas",
    "Flat",
    "Hyperplane",
    "IncidenceGraph",
    "ProjParams",
    "ProjPoint",
    "ProjectiveSpace",
    "build_space",
    "incidence_graph",
    "phi",
]
