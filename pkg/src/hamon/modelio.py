"""JSON model and safety-spec files.

Model file::

    {"variables": ["x1", "x2"],
     "locations": [{"id": "l0", "flow": ["7.5 <= x1' <= 8.5"], "invariant": [],
                    "initial": ["x1 = 40", "x2 = 35"], "accepting": false}],
     "edges": [{"from": "l0", "to": "l1", "guard": ["x1 - x2 <= 4"],
                "update": {"x1": ["0", "1"]}}]}

A missing ``initial`` (or ``["false"]``) means the location is not initial.
Spec file: ``{"atoms": ["x1 - x2 > 0"]}``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .constraints import ConstraintSyntaxError, parse_atoms
from .geometry import DimensionError, IntervalUpdate, LinearConstraint, Polyhedron, VarSpace
from .model import Edge, Lha, Location, SafetySpec, spec_from_strings
from .numeric import as_rational, format_rational


class ModelFormatError(ValueError):
    pass


def polyhedron_from_strings(space: VarSpace, texts: Sequence[str]) -> Polyhedron:
    cons = []
    for text in texts:
        atoms = parse_atoms(text)
        if atoms is None:
            return Polyhedron.empty(space)
        for a in atoms:
            try:
                cons.append(LinearConstraint.of(space, a.as_dict(), a.relation, a.bound))
            except DimensionError as exc:
                raise ModelFormatError(f"{exc} in constraint {text!r}") from None
    return Polyhedron.from_constraints(space, cons)


def polyhedron_to_strings(p: Polyhedron) -> list[str]:
    if p.is_empty():
        return ["false"]
    text = str(p)
    return [] if text == "true" else text.split(" & ")


def _as_list(value, where: str) -> list[str]:
    if value is None:
        return []
    if isinstance(value, str):
        return [value]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ModelFormatError(f"{where}: expected a list of constraint strings")
    return value


def _literal(v):
    # JSON numbers arrive as int/float; floats go through their decimal text
    if isinstance(v, float):
        return as_rational(repr(v))
    return as_rational(v)


def model_from_dict(data: dict) -> Lha:
    try:
        space = VarSpace(data["variables"])
        dspace = space.derivatives()
        locs = []
        for raw in data["locations"]:
            lid = str(raw["id"])
            where = f"location {lid!r}"
            init_texts = raw.get("initial")
            initial = (
                Polyhedron.empty(space)
                if init_texts is None
                else polyhedron_from_strings(space, _as_list(init_texts, where + " initial"))
            )
            locs.append(
                Location(
                    lid,
                    polyhedron_from_strings(dspace, _as_list(raw.get("flow"), where + " flow")),
                    polyhedron_from_strings(space, _as_list(raw.get("invariant"), where + " invariant")),
                    initial,
                    bool(raw.get("accepting", False)),
                )
            )
        edges = []
        for raw in data.get("edges", []):
            upd = {k: (_literal(lo), _literal(hi)) for k, (lo, hi) in (raw.get("update") or {}).items()}
            edges.append(
                Edge(
                    str(raw["from"]),
                    polyhedron_from_strings(space, _as_list(raw.get("guard"), "edge guard")),
                    str(raw["to"]),
                    IntervalUpdate(upd),
                    raw.get("label"),
                )
            )
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model: {exc!r}") from None
    except (ConstraintSyntaxError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(str(exc)) from None
    return Lha(space, locs, edges)


def model_to_dict(m: Lha) -> dict:
    locs = []
    for l in m.locations:
        entry = {
            "id": l.id,
            "flow": polyhedron_to_strings(l.flow),
            "invariant": polyhedron_to_strings(l.invariant),
        }
        if not l.initial.is_empty():
            entry["initial"] = polyhedron_to_strings(l.initial)
        entry["accepting"] = l.accepting
        locs.append(entry)
    edges = []
    for e in m.edges:
        entry = {"from": e.source, "to": e.target, "guard": polyhedron_to_strings(e.guard)}
        if e.update:
            entry["update"] = {v: [format_rational(lo), format_rational(hi)] for v, lo, hi in e.update}
        if e.label:
            entry["label"] = e.label
        edges.append(entry)
    return {"variables": list(m.space.names), "locations": locs, "edges": edges}


def load_model(path: str | Path) -> Lha:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from None
    return model_from_dict(data)


def dump_model(m: Lha, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(m), indent=2) + "\n")


def load_spec(path: str | Path) -> SafetySpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from None
    try:
        return spec_from_strings(_as_list(data["atoms"], "spec atoms"))
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed spec: {exc!r}") from None
    except ConstraintSyntaxError as exc:
        raise ModelFormatError(str(exc)) from None
