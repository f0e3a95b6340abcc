"""Incremental membership monitoring against a bounding automaton.

Between two samples the monitor computes, per location, the states
reachable within the elapsed duration.  A fresh clock ``delta`` measures
time since the last sample, so a state is compatible with the next sample
exactly when ``(sample values, duration)`` lies in one of the stored
regions.  The surviving points seed the next interval.

Reachability in linear hybrid automata is undecidable, so the number of
discrete steps explored per interval is capped; hitting the cap makes the
affected verdicts inconclusive rather than rejected.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .geometry import LinearConstraint, Polyhedron, VarSpace, merge_if_convex
from .log import Sample, TimedQuantitativeWord
from .model import Lha

ACCEPTED = "accepted"
REJECTED = "rejected"
INCONCLUSIVE = "inconclusive"

LOG_INCONSISTENT = "log inconsistent with bounding model"


class MonitorError(ValueError):
    pass


@dataclass(frozen=True)
class MonitorConfig:
    """``max_discrete_steps_per_interval=None`` means ``10 * |L|``."""

    max_discrete_steps_per_interval: int | None = None
    merge_polyhedra: bool = True
    emit_witness: bool = True

    def cap_for(self, m: Lha) -> int:
        if self.max_discrete_steps_per_interval is not None:
            if self.max_discrete_steps_per_interval < 1:
                raise ValueError("the discrete step cap must be positive")
            return self.max_discrete_steps_per_interval
        env = os.environ.get("HAMON_CAP")
        if env:
            return int(env)
        return 10 * len(m.locations)


@dataclass(frozen=True)
class SymbolicState:
    location: str
    region: Polyhedron


@dataclass(frozen=True)
class WitnessStep:
    """``kind`` is ``start``, ``elapse``, ``jump`` or ``sample``; ``edge`` is the
    index into the model's edge list for jumps."""

    kind: str
    location: str
    region: Polyhedron
    edge: int | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "location": self.location, "region": str(self.region)}
        if self.edge is not None:
            out["edge"] = self.edge
        return out


class _Node:
    # linked witness chain; regions may still carry the interval clock
    __slots__ = ("kind", "location", "region", "edge", "parent")

    def __init__(self, kind, location, region, edge, parent):
        self.kind = kind
        self.location = location
        self.region = region
        self.edge = edge
        self.parent = parent


def _unwind(node: _Node | None, space: VarSpace) -> list[WitnessStep]:
    steps = []
    while node is not None:
        region = node.region
        if region.space != space:
            region = region.eliminate([n for n in region.space.names if n not in space])
        steps.append(WitnessStep(node.kind, node.location, region, node.edge))
        node = node.parent
    steps.reverse()
    return steps


@dataclass
class IndexResult:
    index: int
    timestamp: Fraction
    verdict: str
    saturated: bool = False
    diagnostic: str | None = None
    _node: _Node | None = field(default=None, repr=False, compare=False)
    _space: VarSpace | None = field(default=None, repr=False, compare=False)

    @property
    def witness(self) -> list[WitnessStep] | None:
        if self._node is None:
            return None
        return _unwind(self._node, self._space)

    def to_dict(self, with_witness: bool = False) -> dict:
        out = {"i": self.index, "timestamp": str(self.timestamp), "verdict": self.verdict}
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        if with_witness and self.verdict == ACCEPTED and self._node is not None:
            out["witness"] = [s.to_dict() for s in self.witness]
        return out


@dataclass
class MonitorVerdict:
    results: list[IndexResult]
    saturated_intervals: list[int]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def C(self) -> list[int]:
        return [r.index for r in self.results if r.verdict == ACCEPTED]

    @property
    def verdicts(self) -> list[str]:
        return [r.verdict for r in self.results]

    def to_dict(self, with_witness: bool = False) -> dict:
        return {
            "indices": [r.to_dict(with_witness) for r in self.results],
            "C": self.C,
            "saturated_intervals": self.saturated_intervals,
            "diagnostics": self.diagnostics,
        }


# ----------------------------------------------------------------------
# per-model precomputation


def _clock_name(space: VarSpace) -> str:
    name = "delta"
    while name in space:
        name = "_" + name
    return name


class _Compiled:
    """Model pieces lifted to the space extended with the interval clock."""

    def __init__(self, m: Lha):
        self.m = m
        self.clock = _clock_name(m.space)
        self.xd = m.space.extend([self.clock])
        dd = self.xd.derivatives()
        k = len(m.space)
        unit = LinearConstraint(tuple(Fraction(int(i == k)) for i in range(k + 1)), "=", 1)
        nonneg = LinearConstraint(tuple(Fraction(int(i == k)) for i in range(k + 1)), ">=", 0)
        self.flow = {}
        self.inv = {}
        for loc in m.locations:
            if loc.flow.is_empty():
                continue
            self.flow[loc.id] = loc.flow.embed(dd).add_constraints([unit])
            self.inv[loc.id] = loc.invariant.embed(self.xd).add_constraints([nonneg])
        self.guard = [e.guard.embed(self.xd) for e in m.edges]
        self.accepting = m.accepting

    def at_zero(self, region: Polyhedron) -> Polyhedron:
        k = len(self.m.space)
        zero = LinearConstraint(tuple(Fraction(int(i == k)) for i in range(k + 1)), "=", 0)
        return region.embed(self.xd).add_constraints([zero])


# ----------------------------------------------------------------------
# reachability within one interval


@dataclass
class _Stored:
    region: Polyhedron  # over X + clock, already time-elapsed
    node: _Node | None


class _Reach:
    """Worklist exploration of one interval; stored regions per location."""

    def __init__(self, comp: _Compiled, duration: Fraction, cap: int, merge: bool, witness: bool):
        self.comp = comp
        self.d = duration
        self.cap = cap
        self.merge = merge
        self.witness = witness
        self.stored: dict[str, list[_Stored]] = {}
        self.steps = 0
        self.saturated = False

    def _pruned(self, loc: str, P: Polyhedron) -> bool:
        return any(s.region.includes(P) for s in self.stored.get(loc, ()))

    def run(self, start: Iterable[tuple[str, Polyhedron, _Node | None]]) -> None:
        comp = self.comp
        m = comp.m
        queue = deque(start)
        while queue:
            loc, P, node = queue.popleft()
            if loc not in comp.flow or self._pruned(loc, P):
                continue
            R = P.time_elapse(comp.flow[loc], self.d, comp.clock).intersect(comp.inv[loc])
            if R.is_empty() or self._pruned(loc, R):
                continue
            rnode = _Node("elapse", loc, R, None, node) if self.witness else None
            self.stored.setdefault(loc, []).append(_Stored(R, rnode))
            for k in m.outgoing(loc):
                e = m.edges[k]
                if e.target not in comp.flow:
                    continue
                G = R.intersect(comp.guard[k])
                if G.is_empty():
                    continue
                if e.update:
                    G = G.apply_update(e.update)
                G = G.intersect(comp.inv[e.target])
                if G.is_empty():
                    continue
                if self._pruned(e.target, G):
                    continue
                if self.steps >= self.cap:
                    self.saturated = True
                    return
                self.steps += 1
                jnode = _Node("jump", e.target, G, k, rnode) if self.witness else None
                queue.append((e.target, G, jnode))

    def hits(self, values: Sequence[Fraction]) -> list[tuple[str, _Node | None]]:
        """Locations (first matching region each) containing the sample point."""
        point = tuple(values) + (self.d,)
        out = []
        for loc, entries in self.stored.items():
            for s in entries:
                if s.region.contains_point(point):
                    out.append((loc, s.node))
                    break
        return out

    def result_states(self) -> list[SymbolicState]:
        """Stored regions at the end of the interval, clock projected away."""
        clock = self.comp.clock
        k = len(self.comp.m.space)
        at_end = LinearConstraint(tuple(Fraction(int(i == k)) for i in range(k + 1)), "=", self.d)
        out = []
        for loc, entries in self.stored.items():
            regions = []
            for s in entries:
                P = s.region.add_constraints([at_end])
                if not P.is_empty():
                    regions.append(P.eliminate([clock]))
            if self.merge:
                regions = merge_regions(regions)
            out += [SymbolicState(loc, P) for P in regions]
        return out


def merge_regions(regions: Sequence[Polyhedron]) -> list[Polyhedron]:
    """Pairwise convex-union merging and removal of contained regions."""
    out: list[Polyhedron] = []
    for P in regions:
        changed = True
        while changed:
            changed = False
            for k, Q in enumerate(out):
                merged = merge_if_convex(Q, P)
                if merged is not None:
                    out.pop(k)
                    P = merged
                    changed = True
                    break
        out.append(P)
    return out


# ----------------------------------------------------------------------
# public operations


def initial_states(m: Lha) -> list[SymbolicState]:
    out = []
    for loc in m.locations:
        P = loc.initial.intersect(loc.invariant)
        if not P.is_empty() and not loc.flow.is_empty():
            out.append(SymbolicState(loc.id, P))
    return out


def bounded_reach(
    m: Lha, start: Sequence[SymbolicState], d, cfg: MonitorConfig = MonitorConfig()
) -> tuple[list[SymbolicState], bool]:
    """States reachable from ``start`` (regions over the model variables) in
    exactly ``d`` time units; the flag reports a hit of the step cap."""
    d = Fraction(d)
    if d < 0:
        raise ValueError("negative duration")
    comp = _Compiled(m)
    reach = _Reach(comp, d, cfg.cap_for(m), cfg.merge_polyhedra, False)
    reach.run((s.location, comp.at_zero(s.region), None) for s in start)
    return reach.result_states(), reach.saturated


def restrict_to_sample(states: Iterable[SymbolicState], sample: Sample | Sequence) -> list[SymbolicState]:
    values = sample.values if isinstance(sample, Sample) else tuple(sample)
    out = []
    seen = set()
    for s in states:
        if s.location in seen:
            continue
        if s.region.contains_point(values):
            seen.add(s.location)
            out.append(SymbolicState(s.location, Polyhedron.from_point(s.region.space, values)))
    return out


class MonitorSession:
    """Online monitor: feed samples one at a time."""

    def __init__(self, m: Lha, cfg: MonitorConfig = MonitorConfig()):
        self.m = m
        self.cfg = cfg
        self.comp = _Compiled(m)
        self.cap = cfg.cap_for(m)
        self.space = m.space
        self.index = 0
        self.last_time = Fraction(0)
        # current states: (location, region over X + clock at zero, witness node)
        self.current = []
        for s in initial_states(m):
            node = _Node("start", s.location, s.region, None, None) if cfg.emit_witness else None
            self.current.append((s.location, self.comp.at_zero(s.region), node))
        self.tainted = False  # some earlier interval hit the cap
        self.dead = False  # State became empty without saturation
        self.saturated_intervals: list[int] = []
        self.diagnostics: list[str] = []

    def feed(self, sample: Sample) -> IndexResult:
        if len(sample.values) != len(self.space):
            raise MonitorError(
                f"sample has {len(sample.values)} values, model has {len(self.space)} variables"
            )
        if sample.timestamp < self.last_time:
            raise MonitorError(f"timestamp {sample.timestamp} is before {self.last_time}")
        self.index += 1
        i = self.index
        d = sample.timestamp - self.last_time
        self.last_time = sample.timestamp
        if self.dead:
            return IndexResult(i, sample.timestamp, REJECTED, diagnostic=LOG_INCONSISTENT)
        reach = _Reach(self.comp, d, self.cap, self.cfg.merge_polyhedra, self.cfg.emit_witness)
        reach.run(self.current)
        if reach.saturated:
            self.tainted = True
            self.saturated_intervals.append(i)
        hits = reach.hits(sample.values)
        point = Polyhedron.from_point(self.space, sample.values)
        nxt = []
        accept_node = None
        accepted = False
        for loc, node in hits:
            snode = _Node("sample", loc, point, None, node) if self.cfg.emit_witness else None
            nxt.append((loc, self.comp.at_zero(point), snode))
            if loc in self.comp.accepting and not accepted:
                accepted = True
                accept_node = snode
        self.current = nxt
        if accepted:
            return IndexResult(i, sample.timestamp, ACCEPTED, reach.saturated, None, accept_node, self.space)
        if self.tainted:
            return IndexResult(i, sample.timestamp, INCONCLUSIVE, reach.saturated, "exploration cap reached")
        if not nxt:
            self.dead = True
            self.diagnostics.append(f"index {i}: {LOG_INCONSISTENT}")
            return IndexResult(i, sample.timestamp, REJECTED, diagnostic=LOG_INCONSISTENT)
        return IndexResult(i, sample.timestamp, REJECTED)

    def states(self) -> list[SymbolicState]:
        """Current sample-compatible states (points) over the model variables."""
        clock = self.comp.clock
        return [SymbolicState(loc, P.eliminate([clock])) for loc, P, _ in self.current]


def iter_monitor(m: Lha, samples: Iterable[Sample], cfg: MonitorConfig = MonitorConfig()) -> Iterator[IndexResult]:
    session = MonitorSession(m, cfg)
    for s in samples:
        yield session.feed(s)


def run_monitor(m: Lha, w: TimedQuantitativeWord, cfg: MonitorConfig = MonitorConfig()) -> MonitorVerdict:
    if w.space != m.space:
        raise MonitorError(f"log variables {list(w.space.names)} differ from model variables {list(m.space.names)}")
    session = MonitorSession(m, cfg)
    results = [session.feed(s) for s in w]
    return MonitorVerdict(results, session.saturated_intervals, session.diagnostics)


# ----------------------------------------------------------------------
# witness checking


def replay_witness(m: Lha, steps: Sequence[WitnessStep], w: TimedQuantitativeWord | None = None) -> bool:
    """Re-check a witness: every region nonempty and reachable from its
    predecessor by the step it claims; sample steps must match ``w``."""
    if not steps or steps[0].kind != "start":
        return False
    first = steps[0]
    loc = m.location(first.location)
    if first.region.is_empty() or not loc.initial.intersect(loc.invariant).includes(first.region):
        return False
    samples = iter(w) if w is not None else None
    prev = first
    for step in steps[1:]:
        if step.region.is_empty():
            return False
        if step.kind == "elapse":
            if step.location != prev.location:
                return False
            here = m.location(step.location)
            post = prev.region.time_elapse(here.flow).intersect(here.invariant)
        elif step.kind == "jump":
            e = m.edges[step.edge]
            if e.source != prev.location or e.target != step.location:
                return False
            post = prev.region.intersect(e.guard)
            if e.update:
                post = post.apply_update(e.update)
            post = post.intersect(m.location(e.target).invariant)
        elif step.kind == "sample":
            if step.location != prev.location:
                return False
            post = prev.region
            if samples is not None:
                s = next(samples, None)
                if s is None or not step.region.equals(Polyhedron.from_point(m.space, s.values)):
                    return False
        else:
            return False
        if not post.includes(step.region):
            return False
        prev = step
    return prev.kind == "sample"
