"""Exact closed convex polyhedra (double description over the integers)."""
from . import kernels
from .polyhedron import Polyhedron, covers, merge_if_convex, union_equals
from .space import DimensionError, IntervalUpdate, LinearConstraint, VarSpace

__all__ = [
    "DimensionError",
    "IntervalUpdate",
    "LinearConstraint",
    "Polyhedron",
    "VarSpace",
    "kernels",
    "covers",
    "merge_if_convex",
    "union_equals",
]
