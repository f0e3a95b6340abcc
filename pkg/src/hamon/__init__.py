"""Model-bounded monitoring of sampled logs against linear hybrid automata."""
from .benchmarks import acci, accc, accd, builtin_model, platoon
from .geometry import IntervalUpdate, LinearConstraint, Polyhedron, VarSpace, merge_if_convex
from .log import Sample, TimedQuantitativeWord, format_log, generate_log, parse_log
from .model import Edge, Lha, Location, SafetySpec, against_safety, product, spec_from_strings, validate
from .modelio import load_model, load_spec
from .monitor import (
    ACCEPTED,
    INCONCLUSIVE,
    REJECTED,
    MonitorConfig,
    MonitorSession,
    MonitorVerdict,
    SymbolicState,
    bounded_reach,
    initial_states,
    restrict_to_sample,
    run_monitor,
)
from .oracle import brute_force_membership
from .translate import export_external, method1_verdict, tqw2lha

__version__ = "0.1.0"

__all__ = [
    "ACCEPTED",
    "INCONCLUSIVE",
    "REJECTED",
    "Edge",
    "IntervalUpdate",
    "Lha",
    "LinearConstraint",
    "Location",
    "MonitorConfig",
    "MonitorSession",
    "MonitorVerdict",
    "Polyhedron",
    "SafetySpec",
    "Sample",
    "SymbolicState",
    "TimedQuantitativeWord",
    "VarSpace",
    "acci",
    "accc",
    "accd",
    "against_safety",
    "bounded_reach",
    "brute_force_membership",
    "builtin_model",
    "export_external",
    "format_log",
    "generate_log",
    "initial_states",
    "load_model",
    "load_spec",
    "merge_if_convex",
    "method1_verdict",
    "parse_log",
    "platoon",
    "product",
    "restrict_to_sample",
    "run_monitor",
    "spec_from_strings",
    "tqw2lha",
    "validate",
]
