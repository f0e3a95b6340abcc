"""Monitoring by translation: turn the log into an automaton, compose it with
the bounding model and ask a single reachability question.

The word automaton is a chain ``w0 -> w1 -> ... -> wm``.  Location ``wi``
is occupied after the i-th sample; the edge into ``wi`` fires exactly at
``t_abs = tau_i`` with the model variables equal to the sampled values and
resets ``t_rel``.  Index ``i`` is accepted when the product reaches an
accepting model location paired with ``wi`` while ``t_rel = 0``, that is,
at the instant of the i-th sample.

The export dialect is a PHAVer-flavoured text format, documented in
``docs/export-format.md``; :func:`parse_export` reads it back.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .constraints import parse_atoms
from .geometry import IntervalUpdate, LinearConstraint, Polyhedron, VarSpace
from .log import TimedQuantitativeWord
from .model import Edge, Lha, Location, product
from .modelio import polyhedron_to_strings
from .monitor import (
    ACCEPTED,
    INCONCLUSIVE,
    REJECTED,
    IndexResult,
    MonitorConfig,
    MonitorError,
    MonitorVerdict,
    _Compiled,
    _Node,
    _Reach,
)
from .numeric import format_rational

T_ABS = "t_abs"
T_REL = "t_rel"
SAMPLE_LABEL = "sample"


class TranslationError(ValueError):
    pass


def word_location(i: int) -> str:
    return f"w{i}"


def _clocks(space: VarSpace) -> tuple[str, str]:
    a, r = T_ABS, T_REL
    while a in space or r in space:
        a, r = "_" + a, "_" + r
    return a, r


def tqw2lha(w: TimedQuantitativeWord, space: VarSpace | None = None) -> Lha:
    """Chain automaton over the word's variables plus two unit-rate clocks."""
    space = space or w.space
    if len(w) == 0:
        raise TranslationError("translation needs at least one sample")
    if w.space != space:
        raise TranslationError(f"log variables {list(w.space.names)} differ from {list(space.names)}")
    ta, tr = _clocks(space)
    X = space.extend([ta, tr])
    D = X.derivatives()
    ia, ir = X.index(ta), X.index(tr)

    def unit(i, rel, b, sp=X):
        return LinearConstraint(tuple(Fraction(int(k == i)) for k in range(len(sp))), rel, b)

    flow = Polyhedron.from_constraints(D, [unit(ia, "=", 1, D), unit(ir, "=", 1, D)])
    locs = []
    m = len(w)
    for i in range(m + 1):
        # the location before sample i+1 must not outlive its timestamp;
        # the last one is capped at the final timestamp
        limit = w[i].timestamp if i < m else w[m - 1].timestamp
        inv = Polyhedron.from_constraints(X, [unit(ia, "<=", limit)])
        init = Polyhedron.empty(X)
        if i == 0:
            init = Polyhedron.from_constraints(X, [unit(ia, "=", 0), unit(ir, "=", 0)])
        locs.append(Location(word_location(i), flow, inv, init))
    edges = []
    for i, s in enumerate(w):
        cons = [unit(ia, "=", s.timestamp)]
        cons += [unit(k, "=", v) for k, v in enumerate(s.values)]
        edges.append(
            Edge(
                word_location(i),
                Polyhedron.from_constraints(X, cons),
                word_location(i + 1),
                IntervalUpdate({tr: (0, 0)}),
                SAMPLE_LABEL,
            )
        )
    return Lha(X, locs, edges)


def monitor_product(m: Lha, w: TimedQuantitativeWord) -> tuple[Lha, dict[str, tuple[str, int]]]:
    """``m || tqw2lha(w)`` and a map from product ids to (model id, word index)."""
    mw = tqw2lha(w, m.space)
    P = product(m, mw, accepting_from="a")
    origin = {}
    for lm in m.locations:
        for i in range(len(w) + 1):
            origin[f"({lm.id}.{word_location(i)})"] = (lm.id, i)
    return P, origin


def method1_verdict(
    m: Lha,
    w: TimedQuantitativeWord,
    cfg: MonitorConfig = MonitorConfig(),
    sample_instant_only: bool = True,
) -> MonitorVerdict:
    """Verdicts from one reachability run over the product.

    With ``sample_instant_only=False`` the ``t_rel = 0`` condition is
    dropped and any accepting state paired with ``wi`` accepts index ``i``;
    that variant over-reports and exists to show why the condition matters.
    """
    if w.space != m.space:
        raise MonitorError(f"log variables {list(w.space.names)} differ from model variables {list(m.space.names)}")
    if len(w) == 0:
        return MonitorVerdict([], [], [])
    P, origin = monitor_product(m, w)
    comp = _Compiled(P)
    cap = cfg.cap_for(m) * (len(w) + 1)
    horizon = w[len(w) - 1].timestamp
    reach = _Reach(comp, horizon, cap, False, cfg.emit_witness)
    start = []
    for loc in P.locations:
        R = loc.initial.intersect(loc.invariant)
        if R.is_empty() or loc.flow.is_empty():
            continue
        node = _Node("start", loc.id, R, None, None) if cfg.emit_witness else None
        start.append((loc.id, comp.at_zero(R), node))
    reach.run(start)

    _, tr = _clocks(m.space)
    k = comp.xd.index(tr)
    at_sample = LinearConstraint(tuple(Fraction(int(j == k)) for j in range(len(comp.xd))), "=", 0)
    found: dict[int, _Node | None] = {}
    for pid, entries in reach.stored.items():
        lm, i = origin[pid]
        if i == 0 or i in found or not m.location(lm).accepting:
            continue
        for s in entries:
            R = s.region.add_constraints([at_sample]) if sample_instant_only else s.region
            if not R.is_empty():
                found[i] = s.node
                break
    results = []
    for i, s in enumerate(w, 1):
        if i in found:
            results.append(IndexResult(i, s.timestamp, ACCEPTED, reach.saturated, None, found[i], P.space))
        elif reach.saturated:
            results.append(IndexResult(i, s.timestamp, INCONCLUSIVE, True, "exploration cap reached"))
        else:
            results.append(IndexResult(i, s.timestamp, REJECTED))
    return MonitorVerdict(results, [len(w)] if reach.saturated else [], [])


# ----------------------------------------------------------------------
# export dialect

AUTOMATON = "monitor"
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _mangle_ids(ids: Sequence[str]) -> dict[str, str]:
    out, used = {}, set()
    for lid in ids:
        base = re.sub(r"[^A-Za-z0-9_]+", "_", lid).strip("_") or "loc"
        if not _IDENT.fullmatch(base):
            base = "l_" + base
        name, k = base, 1
        while name in used:
            k += 1
            name = f"{base}_{k}"
        used.add(name)
        out[lid] = name
    return out


def _conj(p: Polyhedron) -> str:
    parts = polyhedron_to_strings(p)
    if not parts:
        return "true"
    return " & ".join(re.sub(r"(?<![<>=])=(?!=)", "==", c) for c in parts)


def _update_text(update: IntervalUpdate) -> str:
    parts = []
    for v, lo, hi in update:
        if lo == hi:
            parts.append(f"{v}' == {format_rational(lo)}")
        else:
            parts.append(f"{v}' >= {format_rational(lo)} & {v}' <= {format_rational(hi)}")
    return " & ".join(parts)


def export_lha(
    P: Lha, target_clock: str | None = None, header: Sequence[str] = (), targets: Sequence[str] | None = None
) -> str:
    """Serialize an automaton with its reachability query.

    The query targets ``targets`` (default: the accepting locations),
    restricted to ``target_clock == 0`` when a clock name is given.
    """
    names = _mangle_ids([l.id for l in P.locations])
    out = [f"// {h}" for h in header]
    out += [f"// name {names[l.id]} = {l.id}" for l in P.locations]
    labels = sorted({e.label for e in P.edges if e.label})
    out.append(f"automaton {AUTOMATON}")
    out.append(f"state_var: {', '.join(P.space.names)};")
    if labels:
        out.append(f"synclabs: {', '.join(labels)};")
    for l in P.locations:
        out.append(f"loc {names[l.id]}: while {_conj(l.invariant)} wait {{{_conj(l.flow)}}};")
        for k in P.outgoing(l.id):
            e = P.edges[k]
            text = f"    when {_conj(e.guard)}"
            if e.label:
                text += f" sync {e.label}"
            if e.update:
                text += f" do {{{_update_text(e.update)}}}"
            out.append(text + f" goto {names[e.target]};")
    out.append("end")
    out.append("")
    inits = [f"{names[l.id]} & {_conj(l.initial)}" for l in P.locations if not l.initial.is_empty()]
    out.append(f"initial = {AUTOMATON}.{{{', '.join(inits)}}};")
    extra = f" & {target_clock} == 0" if target_clock else ""
    if targets is None:
        targets = [l.id for l in P.locations if l.accepting]
    chosen = set(targets)
    query = [f"{names[l.id]}{extra}" for l in P.locations if l.id in chosen]
    out.append(f"target = {AUTOMATON}.{{{', '.join(query)}}};")
    out.append(f"reach = {AUTOMATON}.reachable;")
    out.append("reach.intersection_assign(target);")
    out.append('reach.print("reachable_targets", 0);')
    return "\n".join(out) + "\n"


def export_external(m: Lha, w: TimedQuantitativeWord) -> str:
    """Product of ``m`` with the word automaton of ``w``, in the export dialect."""
    P, origin = monitor_product(m, w)
    _, tr = _clocks(m.space)
    # the chain location before the first sample is not a sample instant
    targets = [l.id for l in P.locations if l.accepting and origin[l.id][1] > 0]
    header = [
        "hamon export: bounding model composed with a sampled log",
        f"samples: {len(w)}; model locations: {len(m.locations)}",
    ]
    return export_lha(P, tr, header, targets)


class ExportFormatError(ValueError):
    pass


_NAME_LINE = re.compile(r"//\s*name\s+(\S+)\s*=\s*(.+?)\s*$")
_LOC = re.compile(r"loc\s+(\w+)\s*:\s*while\s+(.*?)\s+wait\s*\{(.*)\}\s*;$")
_WHEN = re.compile(r"when\s+(.*?)(?:\s+sync\s+(\w+))?(?:\s+do\s*\{(.*)\})?\s+goto\s+(\w+)\s*;$")
_SET = re.compile(r"(initial|target)\s*=\s*\w+\s*\.\s*\{(.*)\}\s*;$")


def _parse_conj(space: VarSpace, text: str) -> Polyhedron:
    text = text.strip()
    cons = []
    for piece in text.split("&"):
        atoms = parse_atoms(piece)
        if atoms is None:
            return Polyhedron.empty(space)
        for a in atoms:
            cons.append(LinearConstraint.of(space, a.as_dict(), a.relation, a.bound))
    return Polyhedron.from_constraints(space, cons)


def _parse_update(text: str) -> IntervalUpdate:
    bounds: dict[str, list] = {}
    for piece in text.split("&"):
        atoms = parse_atoms(piece)
        if not atoms:
            raise ExportFormatError(f"bad update {piece!r}")
        for a in atoms:
            if len(a.terms) != 1 or a.terms[0][1] != 1 or not a.terms[0][0].endswith("'"):
                raise ExportFormatError(f"update atoms must bound a primed variable: {piece!r}")
            var = a.terms[0][0][:-1]
            lo, hi = bounds.setdefault(var, [None, None])
            if a.relation in ("=", ">="):
                bounds[var][0] = a.bound
            if a.relation in ("=", "<="):
                bounds[var][1] = a.bound
    if any(lo is None or hi is None for lo, hi in bounds.values()):
        raise ExportFormatError("update intervals must be bounded on both sides")
    return IntervalUpdate({v: (lo, hi) for v, (lo, hi) in bounds.items()})


def parse_export(text: str) -> Lha:
    """Read the export dialect back into an automaton (ids restored from the
    ``// name`` comments when present)."""
    original: dict[str, str] = {}
    space = None
    locs: dict[str, dict] = {}
    order: list[str] = []
    edges = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        named = _NAME_LINE.match(line)
        if named:
            original[named.group(1)] = named.group(2)
            continue
        if line.startswith("//") or line.startswith("automaton") or line == "end":
            continue
        if line.startswith("state_var:"):
            space = VarSpace(v.strip() for v in line[len("state_var:") :].rstrip(";").split(","))
            continue
        if line.startswith("synclabs:") or line.startswith("reach"):
            continue
        if space is None:
            raise ExportFormatError(f"line {lineno}: state_var must come first")
        mloc = _LOC.match(line)
        if mloc:
            current = mloc.group(1)
            order.append(current)
            locs[current] = {
                "invariant": _parse_conj(space, mloc.group(2)),
                "flow": _parse_conj(space.derivatives(), mloc.group(3)),
                "initial": Polyhedron.empty(space),
                "accepting": False,
            }
            continue
        mwhen = _WHEN.match(line)
        if mwhen:
            if current is None:
                raise ExportFormatError(f"line {lineno}: transition outside a location")
            guard, label, upd, target = mwhen.groups()
            update = _parse_update(upd) if upd else IntervalUpdate()
            edges.append((current, _parse_conj(space, guard), target, update, label))
            continue
        mset = _SET.match(line)
        if mset:
            kind, body = mset.groups()
            for item in (p.strip() for p in body.split(",") if p.strip()):
                name, _, rest = item.partition("&")
                name = name.strip()
                if name not in locs:
                    raise ExportFormatError(f"line {lineno}: unknown location {name!r}")
                if kind == "initial":
                    locs[name]["initial"] = _parse_conj(space, rest or "true")
                else:
                    locs[name]["accepting"] = True
            continue
        raise ExportFormatError(f"line {lineno}: cannot parse {line!r}")
    if space is None:
        raise ExportFormatError("no state_var declaration")
    rid = lambda n: original.get(n, n)  # noqa: E731
    locations = [
        Location(rid(n), locs[n]["flow"], locs[n]["invariant"], locs[n]["initial"], locs[n]["accepting"])
        for n in order
    ]
    return Lha(space, locations, [Edge(rid(s), g, rid(t), u, l) for s, g, t, u, l in edges])
