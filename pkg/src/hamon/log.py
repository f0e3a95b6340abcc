"""Timed quantitative words: sampled valuations with nondecreasing timestamps."""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import Polyhedron, VarSpace
from .model import Lha
from .numeric import LiteralError, as_rational, format_rational, parse_rational


class LogFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    timestamp: Fraction
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "timestamp", as_rational(self.timestamp))
        object.__setattr__(self, "values", tuple(as_rational(v) for v in self.values))
        if self.timestamp < 0:
            raise LogFormatError(f"negative timestamp {self.timestamp}")

    def valuation(self, space: VarSpace) -> dict[str, Fraction]:
        return dict(zip(space.names, self.values))


class TimedQuantitativeWord:
    """Immutable sequence of samples over a variable space."""

    def __init__(self, space: VarSpace, samples: Iterable[Sample] = ()):
        self.space = space
        self.samples = tuple(samples)
        prev = None
        for k, s in enumerate(self.samples, 1):
            if len(s.values) != len(space):
                raise LogFormatError(f"sample {k} has {len(s.values)} values, expected {len(space)}")
            if prev is not None and s.timestamp < prev:
                raise LogFormatError(f"timestamp decreases at sample {k}: {s.timestamp} < {prev}")
            prev = s.timestamp

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, k):
        return self.samples[k]

    def prefix(self, i: int) -> "TimedQuantitativeWord":
        """``w[i]``: the first ``i`` samples."""
        return TimedQuantitativeWord(self.space, self.samples[:i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimedQuantitativeWord):
            return NotImplemented
        return self.space == other.space and self.samples == other.samples

    def __repr__(self) -> str:
        return f"TimedQuantitativeWord({list(self.space.names)}, {len(self)} samples)"


# ----------------------------------------------------------------------
# CSV


def parse_header(line: str, space: VarSpace | None = None) -> VarSpace:
    cols = [c.strip() for c in next(csv.reader([line]))]
    if not cols or cols[0] != "time":
        raise LogFormatError(f"header must start with 'time', got {line.strip()!r}")
    names = cols[1:]
    if space is not None and tuple(names) != space.names:
        missing = [n for n in space.names if n not in names]
        if missing:
            raise LogFormatError(f"log is missing column(s) {missing}")
        raise LogFormatError(f"log columns {names} do not match model variables {list(space.names)}")
    return VarSpace(names)


def parse_row(line: str, space: VarSpace, lineno: int = 0) -> Sample:
    cells = [c.strip() for c in next(csv.reader([line]))]
    if len(cells) != len(space) + 1:
        raise LogFormatError(f"line {lineno}: expected {len(space) + 1} cells, got {len(cells)}")
    try:
        vals = [parse_rational(c) for c in cells]
    except LiteralError as exc:
        raise LogFormatError(f"line {lineno}: {exc}") from None
    return Sample(vals[0], tuple(vals[1:]))


def _content_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped


def parse_log(text: str, space: VarSpace | None = None) -> TimedQuantitativeWord:
    """Parse CSV with header ``time,x1,...``; ``#`` starts a comment line."""
    lines = _content_lines(text)
    try:
        _, header = next(lines)
    except StopIteration:
        if space is None:
            raise LogFormatError("empty log without header") from None
        return TimedQuantitativeWord(space)
    space = parse_header(header, space)
    samples = [parse_row(line, space, n) for n, line in lines]
    return TimedQuantitativeWord(space, samples)


def format_log(w: TimedQuantitativeWord) -> str:
    out = io.StringIO()
    out.write(",".join(("time",) + w.space.names) + "\n")
    for s in w:
        out.write(",".join(format_rational(v) for v in (s.timestamp,) + s.values) + "\n")
    return out.getvalue()


# ----------------------------------------------------------------------
# random generation


class GenerationStuck(RuntimeError):
    def __init__(self, message: str, partial: TimedQuantitativeWord):
        super().__init__(message)
        self.partial = partial


TIME_GRID = 1000


def _grid_uniform(rng: random.Random, lo: Fraction, hi: Fraction, den: int = TIME_GRID) -> Fraction:
    a = -((-lo * den) // 1)  # ceil
    b = (hi * den) // 1
    if a > b:
        return lo
    return Fraction(rng.randint(int(a), int(b)), den)


def _floor_grid(q: Fraction, den: int = TIME_GRID) -> Fraction:
    return Fraction((q * den) // 1, den)


def random_point(rng: random.Random, P: Polyhedron, weight_den: int = 12, ray_scale: int = 10) -> tuple:
    """Random rational point of ``P``: a convex combination of its vertices
    (weights with denominator ``weight_den``) plus clamped ray and line parts."""
    pts, rays, lines = P.generators()
    if not pts:
        raise ValueError("random point of an empty polyhedron")
    n = len(pts[0])
    cuts = sorted(rng.randint(0, weight_den) for _ in range(len(pts) - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [weight_den])]
    out = [Fraction(0)] * n
    for w, p in zip(parts, pts):
        if w:
            for k in range(n):
                out[k] += Fraction(w, weight_den) * p[k]
    for r in rays:
        c = rng.randint(0, ray_scale)
        for k in range(n):
            out[k] += c * r[k]
    for l in lines:
        c = rng.randint(-ray_scale, ray_scale)
        for k in range(n):
            out[k] += c * l[k]
    return tuple(out)


def _window(polys, x: Sequence[Fraction], f: Sequence[Fraction], smax=None):
    """``[lo, hi]`` of durations ``s >= 0`` with ``x + s f`` in every polyhedron
    of ``polys``, clipped to ``smax``; ``hi`` is ``None`` when unbounded and
    the result is ``None`` when no duration qualifies."""
    lo, hi = Fraction(0), smax
    for c in (c for P in polys for c in P.constraints(minimal=False)):
        lhs = sum(a * v for a, v in zip(c.coefficients, x))
        rate = sum(a * v for a, v in zip(c.coefficients, f))
        rels = ("<=", ">=") if c.relation == "=" else (c.relation,)
        for rel in rels:
            # rewrite as  slack + s * drift >= 0
            slack, drift = (c.bound - lhs, -rate) if rel == "<=" else (lhs - c.bound, rate)
            if drift == 0:
                if slack < 0:
                    return None
            elif drift > 0:
                lo = max(lo, -slack / drift)
            else:
                bound = slack / -drift
                hi = bound if hi is None else min(hi, bound)
    if hi is not None and lo > hi:
        return None
    return lo, hi


def _grid_pick(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    """Uniform grid point of ``[lo, hi]``, or ``lo`` itself if none exists."""
    a = -((-lo * TIME_GRID) // 1)
    b = (hi * TIME_GRID) // 1
    if a > b:
        return lo
    return Fraction(rng.randint(int(a), int(b)), TIME_GRID)


def generate_log(
    m: Lha,
    seed: int,
    length: int,
    interval_range: tuple = (1, 5),
    switch_probability: Fraction = Fraction(1, 2),
    ray_scale: int = 10,
) -> TimedQuantitativeWord:
    """Sample a concrete run of ``m`` and record ``length`` observations.

    The first sample is taken at time 0; gaps between samples are uniform
    on a 1/1000 grid over ``interval_range``.
    """
    lo, hi = (as_rational(v) for v in interval_range)
    if not (0 <= lo <= hi):
        raise ValueError("interval range must satisfy 0 <= lo <= hi")
    if length < 0:
        raise ValueError("negative length")
    rng = random.Random(seed)
    space = m.space
    if length == 0:
        return TimedQuantitativeWord(space)
    starts = [l for l in m.locations if not l.initial.intersect(l.invariant).is_empty()]
    if not starts:
        raise ValueError("model has no nonempty initial location")
    loc = rng.choice(starts)
    x = random_point(rng, loc.initial.intersect(loc.invariant), ray_scale=ray_scale)
    samples = [Sample(Fraction(0), x)]
    t = Fraction(0)

    def land(e, y):
        # target location and post-update point, or None if the invariant fails
        target = m.location(e.target)
        if target.flow.is_empty():
            return None
        y = list(y)
        for var, ulo, uhi in e.update:
            y[space.index(var)] = _grid_uniform(rng, ulo, uhi)
        return (target, tuple(y)) if target.invariant.contains_point(y) else None

    def advance(loc, x, t, T):
        # one attempt at a run segment from time t to T; None when it stalls.
        # Along a sampled flow each edge is enabled on an interval of
        # durations; firings are aimed inside those intervals.
        stalls = 0
        while t < T:
            f = random_point(rng, loc.flow, ray_scale=ray_scale)
            stay = _window([loc.invariant], x, f)
            limit = stay[1] if stay else Fraction(0)
            horizon = T - t
            forced = limit is not None and limit <= horizon
            reach = limit if forced else horizon
            windows = []
            for k in m.outgoing(loc.id):
                e = m.edges[k]
                target = m.location(e.target)
                need = [e.guard] if e.update else [e.guard, target.invariant]
                win = _window(need, x, f, reach)
                if win:
                    windows.append((e, win))
            fire = None
            if forced or (windows and rng.random() < switch_probability):
                if not windows:
                    stalls += 1
                    if stalls > 20:
                        return None
                    continue
                e, (a, b) = rng.choice(windows)
                step = _grid_pick(rng, a, b)
                fire = e
            else:
                step = _grid_uniform(rng, Fraction(1, TIME_GRID), horizon)
            x = tuple(a + step * b for a, b in zip(x, f))
            t += step
            # zero-duration moves count as stalls so switching loops end
            stalls = 0 if step > 0 else stalls + 1
            if stalls > 20:
                return None
            if fire is not None:
                moved = land(fire, x)
                if moved is not None:
                    loc, x = moved
        return loc, x, t

    # states[i] is the (location, point, time) behind samples[i]; an interval
    # that keeps stalling is retried from earlier samples (the run may have
    # entered a location it can no longer leave)
    states = [(loc, x, t)]
    budget = 10 * length + 50
    fails = [0]
    while len(samples) < length:
        loc, x, t = states[-1]
        T = t + _grid_uniform(rng, lo, hi)
        state = advance(loc, x, t, T)
        if state is not None:
            states.append(state)
            samples.append(Sample(state[2], state[1]))
            fails.append(0)
            continue
        budget -= 1
        fails[-1] += 1
        if budget <= 0 or (len(states) == 1 and fails[-1] > 200):
            raise GenerationStuck(
                f"simulation stuck in {loc.id} after time {t}", TimedQuantitativeWord(space, samples)
            )
        if fails[-1] % 20 == 0 and len(states) > 1:
            states.pop()
            samples.pop()
            fails.pop()
    return TimedQuantitativeWord(space, samples)
