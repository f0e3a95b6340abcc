"""Linear hybrid automata: data model, validation, product, violation monitor."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .constraints import Atom
from .geometry import DimensionError, IntervalUpdate, LinearConstraint, Polyhedron, VarSpace


@dataclass(frozen=True)
class Location:
    id: str
    flow: Polyhedron
    invariant: Polyhedron
    initial: Polyhedron
    accepting: bool = False


@dataclass(frozen=True)
class Edge:
    source: str
    guard: Polyhedron
    target: str
    update: IntervalUpdate = field(default_factory=IntervalUpdate)
    label: str | None = None

    def describe(self) -> str:
        text = f"{self.source} -> {self.target} [{self.guard}]"
        if self.update:
            resets = ", ".join(f"{v} := [{lo}, {hi}]" for v, lo, hi in self.update)
            text += f" {{{resets}}}"
        return text


class Lha:
    """An immutable linear hybrid automaton.

    Edges are addressed by their position in :attr:`edges`; that index is what
    witnesses record.
    """

    def __init__(self, space: VarSpace, locations: Iterable[Location], edges: Iterable[Edge]):
        self.space = space
        self.locations = tuple(locations)
        self.edges = tuple(edges)
        self._by_id = {loc.id: loc for loc in self.locations}
        self._outgoing: dict[str, list[int]] = {loc.id: [] for loc in self.locations}
        for k, e in enumerate(self.edges):
            if e.source in self._outgoing:
                self._outgoing[e.source].append(k)

    def location(self, loc_id: str) -> Location:
        return self._by_id[loc_id]

    def outgoing(self, loc_id: str) -> list[int]:
        return self._outgoing.get(loc_id, [])

    @property
    def accepting(self) -> frozenset[str]:
        return frozenset(l.id for l in self.locations if l.accepting)

    def __repr__(self) -> str:
        return f"Lha({list(self.space.names)}, {len(self.locations)} locations, {len(self.edges)} edges)"


@dataclass(frozen=True)
class SafetySpec:
    """Conjunction of atoms that must hold at every instant."""

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a safety specification needs at least one atom")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


class ProductError(ValueError):
    pass


# ----------------------------------------------------------------------
# validation


def validate(m: Lha) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    err = lambda msg: out.append(Diagnostic("error", msg))  # noqa: E731
    warn = lambda msg: out.append(Diagnostic("warning", msg))  # noqa: E731
    dspace = m.space.derivatives()
    seen: set[str] = set()
    for loc in m.locations:
        if loc.id in seen:
            err(f"duplicate location id {loc.id!r}")
        seen.add(loc.id)
        if loc.flow.space != dspace:
            err(f"location {loc.id!r}: flow is over {list(loc.flow.space.names)}, expected {list(dspace.names)}")
        for what in ("invariant", "initial"):
            p = getattr(loc, what)
            if p.space != m.space:
                err(f"location {loc.id!r}: {what} is over {list(p.space.names)}, expected {list(m.space.names)}")
        if loc.flow.space == dspace and loc.flow.is_empty():
            warn(f"location {loc.id!r} has an empty flow; it can never be occupied")
        if (
            loc.initial.space == m.space
            and loc.invariant.space == m.space
            and not loc.initial.is_empty()
            and not loc.invariant.includes(loc.initial)
        ):
            err(f"location {loc.id!r}: initial region is not contained in the invariant")
    if not any(l.initial.space == m.space and not l.initial.is_empty() for l in m.locations):
        warn("no location has a nonempty initial region; the monitored language is empty")
    for k, e in enumerate(m.edges):
        for end in (e.source, e.target):
            if end not in seen:
                err(f"edge {k} ({e.source} -> {e.target}) refers to unknown location {end!r}")
        if e.guard.space != m.space:
            err(f"edge {k}: guard is over {list(e.guard.space.names)}, expected {list(m.space.names)}")
        for v in e.update.variables:
            if v not in m.space:
                err(f"edge {k}: update of unknown variable {v!r}")
    return out


def errors(diags: Sequence[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


# ----------------------------------------------------------------------
# synchronized product


def _pair_id(a: str, b: str) -> str:
    return f"({a}.{b})"


def product(a: Lha, b: Lha, accepting_from: str = "a") -> Lha:
    """Parallel composition over the union of both variable sets.

    Flows, invariants and initial regions of a location pair are the
    intersections of the components'.  Edges of either side fire alone while
    the other side keeps its location.  ``accepting_from`` picks which side's
    accepting flags carry over: ``"a"``, ``"b"`` or ``"both"``.
    """
    if accepting_from not in ("a", "b", "both"):
        raise ValueError("accepting_from must be 'a', 'b' or 'both'")
    for name in a.space.names + b.space.names:
        if name.endswith("'"):
            raise ProductError(f"variable {name!r} clashes with derivative naming")
    space = a.space.extend(b.space.names)
    dspace = space.derivatives()

    def lift(p: Polyhedron, target: VarSpace) -> Polyhedron:
        return p.embed(target)

    locs = []
    for la in a.locations:
        for lb in b.locations:
            if accepting_from == "a":
                acc = la.accepting
            elif accepting_from == "b":
                acc = lb.accepting
            else:
                acc = la.accepting and lb.accepting
            locs.append(
                Location(
                    _pair_id(la.id, lb.id),
                    lift(la.flow, dspace).intersect(lift(lb.flow, dspace)),
                    lift(la.invariant, space).intersect(lift(lb.invariant, space)),
                    lift(la.initial, space).intersect(lift(lb.initial, space)),
                    acc,
                )
            )
    edges = []
    for ea in a.edges:
        g = lift(ea.guard, space)
        for lb in b.locations:
            edges.append(Edge(_pair_id(ea.source, lb.id), g, _pair_id(ea.target, lb.id), ea.update, ea.label))
    for eb in b.edges:
        g = lift(eb.guard, space)
        for la in a.locations:
            edges.append(Edge(_pair_id(la.id, eb.source), g, _pair_id(la.id, eb.target), eb.update, eb.label))
    return Lha(space, locs, edges)


# ----------------------------------------------------------------------
# safety violation automaton

COPY_SUFFIX = "_bad"

_NEGATION = {"<": (">=",), "<=": (">=",), ">": ("<=",), ">=": ("<=",), "=": ("<=", ">=")}


def negated_guards(space: VarSpace, atom: Atom) -> list[Polyhedron]:
    """Closed pieces whose union covers the complement of ``atom``."""
    out = []
    for rel in _NEGATION[atom.relation]:
        c = LinearConstraint.of(space, atom.as_dict(), rel, atom.bound)
        out.append(Polyhedron.from_constraints(space, [c]))
    return out


def against_safety(m: Lha, spec: SafetySpec) -> Lha:
    """Automaton accepting exactly the behaviours of ``m`` that violate ``spec``.

    Every location gets an accepting, non-initial copy; violation edges lead
    from each original into its copy, one per (closed) negated atom, and the
    copies mirror the original edges among themselves.
    """
    for atom in spec.atoms:
        for name, _ in atom.terms:
            if name not in m.space:
                raise DimensionError(f"safety atom mentions {name!r}, not a model variable")
    ids = {l.id for l in m.locations}
    copy = {l.id: l.id + COPY_SUFFIX for l in m.locations}
    clash = ids & set(copy.values())
    if clash:
        raise ValueError(f"location ids {sorted(clash)} collide with copy names")
    locs = [Location(l.id, l.flow, l.invariant, l.initial, False) for l in m.locations]
    locs += [
        Location(copy[l.id], l.flow, l.invariant, Polyhedron.empty(m.space), True) for l in m.locations
    ]
    edges = list(m.edges)
    for l in m.locations:
        for atom in spec.atoms:
            for g in negated_guards(m.space, atom):
                edges.append(Edge(l.id, g, copy[l.id], IntervalUpdate(), "violation"))
    edges += [Edge(copy[e.source], e.guard, copy[e.target], e.update, e.label) for e in m.edges]
    return Lha(m.space, locs, edges)


# ----------------------------------------------------------------------
# convenience builders


def poly(space: VarSpace, texts: Sequence[str] | str) -> Polyhedron:
    """Polyhedron from constraint strings (see :mod:`hamon.constraints`)."""
    from .modelio import polyhedron_from_strings

    if isinstance(texts, str):
        texts = [texts]
    return polyhedron_from_strings(space, texts)


def single_location(space: VarSpace, loc_id: str = "any") -> Lha:
    """One location, universal flow and invariant, universal initial region."""
    return Lha(
        space,
        [
            Location(
                loc_id,
                Polyhedron.universe(space.derivatives()),
                Polyhedron.universe(space),
                Polyhedron.universe(space),
            )
        ],
        [],
    )


def spec_from_strings(texts: Sequence[str]) -> SafetySpec:
    from .constraints import parse_atoms

    atoms: list[Atom] = []
    for t in texts:
        parsed = parse_atoms(t, allow_strict=True)
        if parsed is None:
            raise ValueError("a safety atom cannot be 'false'")
        atoms.extend(parsed)
    return SafetySpec(tuple(atoms))
