"""Brute-force trajectory search, used as an independent one-sided check.

Runs are piecewise-constant in their rates: flows come from a finite set of
points of each flow polytope, switches happen at finitely many candidate
instants, and the last segment of every sample interval is solved exactly
(the rate that lands on the next sample).  A ``True`` answer is backed by a
concrete run; ``False`` only means the search found none.

After each sample the run is at a known point, so the search state between
intervals is just the set of locations the run can be in.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from .geometry import Polyhedron
from .log import TimedQuantitativeWord, _window
from .model import Lha


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleGrid:
    """``time_steps`` equal sub-steps per interval become switch candidates,
    besides the instants where a guard window opens or closes."""

    time_steps: int = 4
    max_switches: int = 2
    ray_scale: int = 4


def flow_candidates(F: Polyhedron, ray_scale: int = 4) -> list[tuple]:
    """Vertices, their centroid and vertex-plus-ray points of a flow polytope."""
    pts, rays, lines = F.generators()
    if not pts:
        return []
    n = len(pts[0])
    out = list(pts)
    if len(pts) > 1:
        out.append(tuple(sum(p[k] for p in pts) / len(pts) for k in range(n)))
    for d in list(rays) + list(lines) + [tuple(-v for v in l) for l in lines]:
        for p in pts:
            out.append(tuple(p[k] + ray_scale * d[k] for k in range(n)))
    seen, uniq = set(), []
    for p in out:
        if p not in seen:
            seen.add(p)
            uniq.append(p)
    return uniq


def _move(x, f, s):
    return tuple(a + s * b for a, b in zip(x, f))


def _update_choices(update, x, space):
    if not update:
        return [tuple(x)]
    outs = [list(x)]
    for var, lo, hi in update:
        k = space.index(var)
        nxt = []
        for o in outs:
            for v in {lo, hi, (lo + hi) / 2}:
                y = list(o)
                y[k] = v
                nxt.append(y)
        outs = nxt
    return [tuple(o) for o in outs]


class _Search:
    def __init__(self, m: Lha, grid: OracleGrid):
        self.m = m
        self.grid = grid
        self.flows = {l.id: flow_candidates(l.flow, grid.ray_scale) for l in m.locations}

    def _land(self, loc, x, goal, T):
        """Exact last segment: constant rate from ``x`` to ``goal`` in ``T``."""
        L = self.m.location(loc)
        if T == 0:
            return tuple(x) == tuple(goal) and L.invariant.contains_point(x)
        f = tuple((g - a) / T for a, g in zip(x, goal))
        return L.flow.contains_point(f) and L.invariant.contains_point(x) and L.invariant.contains_point(goal)

    def _switch_times(self, window, T):
        lo, hi = window
        hi = T if hi is None else min(hi, T)
        if lo > hi:
            return []
        ts = {lo, hi, (lo + hi) / 2}
        n = self.grid.time_steps
        ts.update(Fraction(k, n) * T for k in range(n + 1) if lo <= Fraction(k, n) * T <= hi)
        return sorted(ts)

    def ends(self, loc, x, goal, T, switches) -> set[str]:
        """Locations in which some searched run from ``(loc, x)`` sits at
        ``goal`` after exactly ``T`` time units."""
        m = self.m
        out = set()
        if self._land(loc, x, goal, T):
            out.add(loc)
        if switches == 0:
            return out
        L = m.location(loc)
        if not L.invariant.contains_point(x):
            return out
        for f in self.flows[loc]:
            stay = _window([L.invariant], x, f, T)
            if stay is None:
                continue
            for k in m.outgoing(loc):
                e = m.edges[k]
                target = m.location(e.target)
                win = _window([e.guard], x, f, stay[1] if stay[1] is not None else T)
                if win is None:
                    continue
                for s in self._switch_times(win, T):
                    y = _move(x, f, s)
                    if not e.guard.contains_point(y):
                        continue
                    for z in _update_choices(e.update, y, m.space):
                        if target.invariant.contains_point(z):
                            out |= self.ends(e.target, z, goal, T - s, switches - 1)
        return out


def _start_points(loc, first) -> list[tuple]:
    region = loc.initial.intersect(loc.invariant)
    if region.is_empty():
        return []
    pts = list(region.vertices())
    if region.contains_point(first.values):
        pts.insert(0, tuple(first.values))
    return pts


def brute_force_membership(
    m: Lha, w: TimedQuantitativeWord, grid: OracleGrid = OracleGrid()
) -> list[bool]:
    """Per index: does some searched run hit samples ``1..i`` and sit in an
    accepting location at sample ``i``?"""
    acc = m.accepting
    return [bool(locs & acc) for locs in reachable_locations(m, w, grid)]


def reachable_locations(m: Lha, w: TimedQuantitativeWord, grid: OracleGrid = OracleGrid()) -> list[set[str]]:
    """Per index, the locations some searched run can be in at that sample."""
    if w.space != m.space:
        raise OracleError("log and model variables differ")
    search = _Search(m, grid)
    here: set[str] = set()
    if len(w) == 0:
        return []
    first = w[0]
    for loc in m.locations:
        if not loc.flow.is_empty():
            for x in _start_points(loc, first):
                here |= search.ends(loc.id, x, first.values, first.timestamp, grid.max_switches)
    out = [set(here)]
    for prev, cur in zip(w.samples, w.samples[1:]):
        T = cur.timestamp - prev.timestamp
        nxt: set[str] = set()
        for loc in sorted(here):
            nxt |= search.ends(loc, prev.values, cur.values, T, grid.max_switches)
        here = nxt
        out.append(set(here))
    return out
