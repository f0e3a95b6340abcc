"""Closed convex polyhedra over the rationals in double description.

A polyhedron over ``n`` variables is stored as the homogenised cone in
``n + 1`` integer coordinates ``(t, x1, ..., xn)``:

* constraint rows ``c`` read ``c[0] + c[1:] . x >= 0`` (or ``= 0``),
* point generators have ``t > 0`` and denote ``x / t``,
* rays and lines have ``t = 0``.

Both representations are kept minimal after every operation, so
inclusion, emptiness and membership reduce to sign checks on dot products.

Polyhedra built from constraints start out *lazy*: only the rows are kept
and the generators are computed the first time something needs them.  Box
invariants in high dimension have exponentially many vertices, but the
monitor only ever intersects them with small regions, which works on the
rows alone.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from ..numeric import as_rational
from . import kernels as K
from .space import DimensionError, IntervalUpdate, LinearConstraint, VarSpace


def _unit(n: int, i: int) -> tuple[int, ...]:
    v = [0] * n
    v[i] = 1
    return tuple(v)


def _row_from_constraint(c: LinearConstraint) -> tuple[tuple[int, ...], str]:
    scale = lcm(c.bound.denominator, *(q.denominator for q in c.coefficients))
    a = [int(q * scale) for q in c.coefficients]
    b = int(c.bound * scale)
    if c.relation == "<=":
        return K.normalize([b] + [-x for x in a]), "ineq"
    if c.relation == ">=":
        return K.normalize([-b] + a), "ineq"
    return K.normalize([-b] + a), "eq"


def _point_vector(values: Sequence) -> tuple[int, ...]:
    qs = [as_rational(v) for v in values]
    den = lcm(1, *(q.denominator for q in qs))
    return (den,) + tuple(int(q * den) for q in qs)


class Polyhedron:
    """Immutable closed convex polyhedron over a :class:`VarSpace`."""

    __slots__ = ("space", "_eqs", "_ineqs", "_lines", "_rays", "_csat", "_rsat", "_empty")

    def __init__(self, space: VarSpace, eqs, ineqs, lines, rays, csat, rsat, empty: bool = False):
        self.space = space
        self._eqs = tuple(eqs)
        self._ineqs = tuple(ineqs)
        if lines is None:
            # lazy: generators pending
            self._lines = self._rays = self._csat = self._rsat = None
        else:
            self._lines = tuple(lines)
            self._rays = tuple(rays)
            self._csat = tuple(csat)
            self._rsat = tuple(rsat)
        self._empty = empty

    @classmethod
    def _lazy(cls, space: VarSpace, eqs, ineqs) -> "Polyhedron":
        return cls(space, eqs, ineqs, None, None, None, None, None)

    @property
    def _is_lazy(self) -> bool:
        return self._lines is None

    def _ensure(self) -> None:
        """Compute the double description of a lazy polyhedron in place."""
        if self._lines is not None:
            return
        full = Polyhedron.universe(self.space)._add_rows(self._eqs, self._ineqs)
        for slot in ("_eqs", "_ineqs", "_lines", "_rays", "_csat", "_rsat", "_empty"):
            object.__setattr__(self, slot, getattr(full, slot))

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def universe(cls, space: VarSpace) -> "Polyhedron":
        n = len(space) + 1
        pos = _unit(n, 0)
        return cls(space, (), (pos,), [_unit(n, i) for i in range(1, n)], (pos,), (0,), (0,))

    @classmethod
    def empty(cls, space: VarSpace) -> "Polyhedron":
        n = len(space) + 1
        return cls(space, (), ((-1,) + (0,) * (n - 1),), (), (), (0,), (), empty=True)

    @classmethod
    def from_constraints(cls, space: VarSpace, constraints: Iterable[LinearConstraint]) -> "Polyhedron":
        eqs, ineqs = [], []
        for c in constraints:
            if len(c.coefficients) != len(space):
                raise DimensionError(
                    f"constraint has {len(c.coefficients)} coefficients, space has {len(space)}"
                )
            row, kind = _row_from_constraint(c)
            (eqs if kind == "eq" else ineqs).append(row)
        if not eqs and not ineqs:
            return cls.universe(space)
        return cls._lazy(space, eqs, ineqs)

    @classmethod
    def from_point(cls, space: VarSpace, values: Sequence) -> "Polyhedron":
        if len(values) != len(space):
            raise DimensionError("point dimension does not match space")
        return cls.from_generators(space, points=[values])

    @classmethod
    def from_generators(cls, space: VarSpace, points=(), rays=(), lines=()) -> "Polyhedron":
        """Convex hull of ``points`` plus the cone of ``rays`` and span of ``lines``."""
        pts = [_point_vector(p) for p in points]
        if not pts:
            return cls.empty(space)
        rs = [K.normalize((0,) + _point_vector(r)[1:]) for r in rays]
        ls = [K.normalize((0,) + _point_vector(l)[1:]) for l in lines]
        return cls._from_homogeneous(space, pts + [r for r in rs if any(r)], [l for l in ls if any(l)])

    @classmethod
    def _from_homogeneous(cls, space, rays, lines) -> "Polyhedron":
        n = len(space) + 1
        dual_lines = [_unit(n, i) for i in range(n)]
        ceqs, cineqs = K.add_rows(dual_lines, [], [], 0, lines, rays)
        return cls._finish_gens(space, ceqs, cineqs, lines, rays)

    @classmethod
    def _finish_gens(cls, space, ceqs, cineqs, lines, rays) -> "Polyhedron":
        glines, grays, rsat = K.minimize(ceqs, cineqs, lines, rays)
        # minimise the constraint side against the minimal generators
        eqs, ineqs, csat = K.minimize(glines, grays, ceqs, cineqs)
        return cls(space, eqs, ineqs, glines, grays, csat, K.transpose_sat(csat, len(grays)))

    # ------------------------------------------------------------------
    # internal conversions

    def _add_rows(self, eqs, ineqs) -> "Polyhedron":
        if self._empty:
            return self
        if not eqs and not ineqs:
            return self
        if self._lines is None:
            return Polyhedron._lazy(self.space, self._eqs + tuple(eqs), self._ineqs + tuple(ineqs))
        # rows every generator already satisfies change nothing
        eqs = [r for r in eqs if not self._satisfies(r, True)]
        ineqs = [r for r in ineqs if not self._satisfies(r, False)]
        if not eqs and not ineqs:
            return self
        lines, rays = K.add_rows(
            self._lines, self._rays, self._rsat, len(self._ineqs), eqs, ineqs, True
        )
        if not any(r[0] > 0 for r in rays):
            return Polyhedron.empty(self.space)
        e, i, csat = K.minimize(lines, rays, self._eqs + tuple(eqs), self._ineqs + tuple(ineqs))
        return Polyhedron(self.space, e, i, lines, rays, csat, K.transpose_sat(csat, len(rays)))

    def _satisfies(self, row, is_eq: bool) -> bool:
        dot = K.dot
        for g in self._lines:
            if dot(row, g):
                return False
        if is_eq:
            return not any(dot(row, g) for g in self._rays)
        return all(dot(row, g) >= 0 for g in self._rays)

    def _add_gens(self, rays, lines) -> "Polyhedron":
        self._ensure()
        if self._empty:
            return self
        rays = [r for r in rays if any(r)]
        lines = [l for l in lines if any(l)]
        if not rays and not lines:
            return self
        ceqs, cineqs = K.add_rows(
            self._eqs, self._ineqs, self._csat, len(self._rays), lines, rays
        )
        return Polyhedron._finish_gens(
            self.space, ceqs, cineqs, self._lines + tuple(lines), self._rays + tuple(rays)
        )

    def _check_space(self, other: "Polyhedron"):
        if other.space != self.space:
            raise DimensionError(f"space mismatch: {self.space.names} vs {other.space.names}")

    # ------------------------------------------------------------------
    # queries

    @property
    def dimension(self) -> int:
        return len(self.space)

    def is_empty(self) -> bool:
        self._ensure()
        return self._empty

    def is_universe(self) -> bool:
        self._ensure()
        return not self._empty and not self._eqs and all(not any(c[1:]) for c in self._ineqs)

    def is_bounded(self) -> bool:
        self._ensure()
        return not self._lines and all(r[0] > 0 for r in self._rays)

    def contains_point(self, values: Sequence) -> bool:
        if self._empty:
            return False
        if len(values) != len(self.space):
            raise DimensionError("point dimension does not match space")
        return self._contains_vector(_point_vector(values))

    def _contains_vector(self, p) -> bool:
        dot = K.dot
        for c in self._eqs:
            if dot(c, p):
                return False
        for c in self._ineqs:
            if dot(c, p) < 0:
                return False
        return True

    def includes(self, other: "Polyhedron") -> bool:
        """``other`` is a subset of ``self``."""
        self._check_space(other)
        other._ensure()
        if other._empty:
            return True
        if self._empty:
            return False
        # a lazy ``self`` is tested against its raw rows, which is exact
        dot = K.dot
        gens = other._rays
        lines = other._lines
        for c in self._eqs:
            for g in gens:
                if dot(c, g):
                    return False
            for g in lines:
                if dot(c, g):
                    return False
        for c in self._ineqs:
            for g in gens:
                if dot(c, g) < 0:
                    return False
            for g in lines:
                if dot(c, g):
                    return False
        return True

    def equals(self, other: "Polyhedron") -> bool:
        return self.includes(other) and other.includes(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.space == other.space and self.equals(other)

    __hash__ = None  # semantic equality, no canonical hash

    def intersects(self, other: "Polyhedron") -> bool:
        return not self.intersect(other).is_empty()

    # ------------------------------------------------------------------
    # operations

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        self._check_space(other)
        if other._empty:
            return other
        if self._empty:
            return self
        if other._lines is None:
            return self._add_rows(other._eqs, _nontrivial(other._ineqs))
        if self._lines is None:
            return other._add_rows(self._eqs, _nontrivial(self._ineqs))
        if len(other._rays) * len(other._ineqs) > len(self._rays) * len(self._ineqs):
            small, big = self, other
        else:
            small, big = other, self
        return big._add_rows(small._eqs, [c for c in small._ineqs if any(c[1:])])

    def add_constraints(self, constraints: Iterable[LinearConstraint]) -> "Polyhedron":
        return self.intersect(Polyhedron.from_constraints(self.space, constraints))

    def time_elapse(self, flow: "Polyhedron", bound=None, clock: str | None = None) -> "Polyhedron":
        """Drift every point along directions of ``flow`` (over derivative copies).

        Without ``bound``: ``{v + s f | v in P, f in F, s >= 0}`` (closed).
        With ``bound`` and no ``clock``: exactly ``bound`` time units.
        With ``bound`` and ``clock``: unbounded drift cut at ``clock <= bound``;
        the clock must have rate exactly 1 in ``flow``.
        """
        if flow.dimension != self.dimension:
            raise DimensionError("flow dimension does not match polyhedron")
        if flow.is_empty():
            raise ValueError("time elapse under an empty flow")
        self._ensure()
        if self._empty:
            return self
        if bound is not None:
            bound = as_rational(bound)
            if bound < 0:
                raise ValueError("negative elapse bound")
        if bound is not None and clock is None:
            return self._elapse_exact(flow, bound)
        rays = []
        lines = list(flow._lines)
        for g in flow._rays:
            rays.append(K.normalize((0,) + g[1:]))
        out = self._add_gens(rays, lines)
        if clock is not None:
            k = self.space.index(clock)
            if not _has_unit_rate(flow, k):
                raise ValueError(f"clock {clock!r} must have rate 1 in the flow")
            if bound is not None:
                row = [0] * (self.dimension + 1)
                row[0] = bound.numerator
                row[k + 1] = -bound.denominator
                out = out._add_rows([], [tuple(row)])
        return out

    def _elapse_exact(self, flow: "Polyhedron", d: Fraction) -> "Polyhedron":
        if d == 0:
            return self
        pts, rays = [], []
        for p in self._rays:
            if p[0] == 0:
                rays.append(p)
                continue
            for f in flow._rays:
                if f[0] == 0:
                    continue
                # x_p/t_p + d * x_f/t_f
                t = p[0] * f[0] * d.denominator
                v = [t] + [
                    xp * f[0] * d.denominator + d.numerator * xf * p[0] for xp, xf in zip(p[1:], f[1:])
                ]
                pts.append(K.normalize(v))
        for f in flow._rays:
            if f[0] == 0:
                rays.append(f)
        lines = list(self._lines) + list(flow._lines)
        return Polyhedron._from_homogeneous(self.space, pts + rays, lines)

    def unconstrain(self, names: Iterable[str]) -> "Polyhedron":
        """Existentially quantify ``names`` while keeping their dimensions."""
        n = self.dimension + 1
        lines = [_unit(n, self.space.index(v) + 1) for v in names]
        return self._add_gens([], lines)

    def eliminate(self, names: Iterable[str]) -> "Polyhedron":
        """Project away ``names``; the result lives in the reduced space."""
        names = list(dict.fromkeys(names))
        if not names:
            return self
        new_space = self.space.without(names)
        self._ensure()
        if self._empty:
            return Polyhedron.empty(new_space)
        free = self.unconstrain(names)
        keep = [0] + [self.space.index(v) + 1 for v in new_space.names]

        def cut(v):
            return tuple(v[i] for i in keep)

        eqs = K.echelon([cut(c) for c in free._eqs])
        ineqs = [cut(c) for c in free._ineqs]
        lines = K.echelon([cut(l) for l in free._lines])
        rays = [cut(r) for r in free._rays]
        return Polyhedron(new_space, eqs, ineqs, lines, rays, free._csat, free._rsat)

    def apply_update(self, update: IntervalUpdate | Mapping) -> "Polyhedron":
        if not isinstance(update, IntervalUpdate):
            update = IntervalUpdate(update)
        self._ensure()
        if not update or self._empty:
            return self
        out = self.unconstrain(update.variables)
        n = self.dimension + 1
        ineqs = []
        for var, lo, hi in update:
            k = self.space.index(var) + 1
            lo_row = [0] * n
            lo_row[0] = -lo.numerator
            lo_row[k] = lo.denominator
            hi_row = [0] * n
            hi_row[0] = hi.numerator
            hi_row[k] = -hi.denominator
            ineqs += [tuple(lo_row), tuple(hi_row)]
        return out._add_rows([], ineqs)

    def hull(self, other: "Polyhedron") -> "Polyhedron":
        """Closed convex hull of the union."""
        self._check_space(other)
        self._ensure()
        other._ensure()
        if self._empty:
            return other
        if other._empty:
            return self
        return self._add_gens(other._rays, other._lines)

    def embed(self, target: VarSpace) -> "Polyhedron":
        """Re-index into ``target`` (a superset of names); new variables are free."""
        if target == self.space:
            return self
        pos = [0] + [target.index(v) + 1 for v in self.space.names]
        n = len(target) + 1
        if self._empty:
            return Polyhedron.empty(target)
        if self._lines is None:
            lift_rows = lambda rows: [tuple(_scatter(v, pos, n)) for v in rows]  # noqa: E731
            return Polyhedron._lazy(target, lift_rows(self._eqs), lift_rows(self._ineqs))

        def lift(v):
            out = [0] * n
            for i, x in zip(pos, v):
                out[i] = x
            return tuple(out)

        fresh = [i for i in range(1, n) if i not in set(pos)]
        lines = [lift(l) for l in self._lines] + [_unit(n, i) for i in fresh]
        return Polyhedron(
            target,
            [lift(c) for c in self._eqs],
            [lift(c) for c in self._ineqs],
            lines,
            [lift(r) for r in self._rays],
            self._csat,
            self._rsat,
        )

    def rename(self, mapping: Mapping[str, str]) -> "Polyhedron":
        """Same coordinates, new names."""
        space = VarSpace(mapping.get(v, v) for v in self.space.names)
        return Polyhedron(space, self._eqs, self._ineqs, self._lines, self._rays, self._csat, self._rsat, self._empty)

    # ------------------------------------------------------------------
    # export

    def constraints(self, minimal: bool = True) -> list[LinearConstraint]:
        """Constraint system; ``minimal=False`` returns the stored rows as they
        are, which avoids the generator computation for lazy polyhedra."""
        if minimal:
            self._ensure()
        return self._row_constraints()

    def _row_constraints(self) -> list[LinearConstraint]:
        if self._empty:
            return [LinearConstraint((Fraction(0),) * self.dimension, ">=", 1)]
        out = []
        for c in self._eqs:
            out.append(LinearConstraint(tuple(Fraction(x) for x in c[1:]), "=", Fraction(-c[0])))
        for c in self._ineqs:
            if any(c[1:]):
                out.append(LinearConstraint(tuple(Fraction(x) for x in c[1:]), ">=", Fraction(-c[0])))
        return out

    def generators(self) -> tuple[list[tuple], list[tuple], list[tuple]]:
        """``(points, rays, lines)`` with Fraction coordinates."""
        self._ensure()
        pts, rays = [], []
        for g in self._rays:
            if g[0] > 0:
                pts.append(tuple(Fraction(x, g[0]) for x in g[1:]))
            else:
                rays.append(tuple(Fraction(x) for x in g[1:]))
        return pts, rays, [tuple(Fraction(x) for x in l[1:]) for l in self._lines]

    def vertices(self) -> list[tuple]:
        return self.generators()[0]

    def bounds(self, name: str) -> tuple[Fraction | None, Fraction | None]:
        """Exact ``(min, max)`` of one coordinate; ``None`` for unbounded sides."""
        if self._empty:
            raise ValueError("bounds of an empty polyhedron")
        self._ensure()
        if self._empty:
            raise ValueError("bounds of an empty polyhedron")
        k = self.space.index(name) + 1
        if any(l[k] for l in self._lines):
            return None, None
        lo = hi = None
        lo_inf = hi_inf = False
        for g in self._rays:
            if g[0] == 0:
                if g[k] > 0:
                    hi_inf = True
                elif g[k] < 0:
                    lo_inf = True
                continue
            v = Fraction(g[k], g[0])
            lo = v if lo is None or v < lo else lo
            hi = v if hi is None or v > hi else hi
        return (None if lo_inf else lo), (None if hi_inf else hi)

    def __repr__(self) -> str:
        if self._empty:
            return "Polyhedron(false)"
        return f"Polyhedron({self})"

    def __str__(self) -> str:
        if self._empty:
            return "false"
        # lazy polyhedra print their raw rows rather than paying for a conversion
        parts = [_pretty(c).format(self.space) for c in self._row_constraints()]
        return " & ".join(parts) if parts else "true"


def _pretty(c: LinearConstraint) -> LinearConstraint:
    nonzero = [q for q in c.coefficients if q]
    lead = nonzero[0] if nonzero else 0
    # unit leading coefficient when that keeps the others integral
    scale = abs(lead) if lead and all((q / lead).denominator == 1 for q in nonzero) else 1
    if lead < 0:
        scale = -scale
    if scale == 1:
        return c
    rel = c.relation if scale > 0 else {"<=": ">=", ">=": "<=", "=": "="}[c.relation]
    return LinearConstraint(tuple(q / scale for q in c.coefficients), rel, c.bound / scale)


def _has_unit_rate(flow: Polyhedron, k: int) -> bool:
    lo, hi = flow.bounds(flow.space.names[k])
    return lo == 1 and hi == 1


def strictly_below(P: Polyhedron, row) -> bool:
    """Some point of ``P`` has ``row . (1, x) < 0``."""
    P._ensure()
    if P._empty:
        return False
    dot = K.dot
    if any(dot(row, l) for l in P._lines):
        return True
    return any(dot(row, g) < 0 for g in P._rays)


def covers(pieces: Sequence[Polyhedron], target: Polyhedron) -> bool:
    """Exact test ``target ⊆ ∪ pieces`` for closed polyhedra."""
    if target.is_empty():
        return True
    live = [p for p in pieces if p.intersects(target)]
    if not live:
        return False
    for p in live:
        if p.includes(target):
            return True
    head, rest = live[0], live[1:]
    head._ensure()
    acc = target
    rows = [(c, False) for c in head._ineqs] + [(c, True) for c in head._eqs]
    for c, is_eq in rows:
        sides = [c, tuple(-x for x in c)] if is_eq else [c]
        for side in sides:
            # piece where ``side`` is violated, closed
            if strictly_below(acc, side):
                closure = acc._add_rows([], [tuple(-x for x in side)])
                if not covers(rest, closure):
                    return False
            acc = acc._add_rows([], [side])
            if acc.is_empty():
                return True
    return True


def union_equals(a: Sequence[Polyhedron], b: Sequence[Polyhedron]) -> bool:
    return all(covers(b, p) for p in a) and all(covers(a, q) for q in b)


def merge_if_convex(P: Polyhedron, Q: Polyhedron) -> Polyhedron | None:
    """Return the hull of ``P ∪ Q`` when that union is itself convex."""
    P._check_space(Q)
    if P.includes(Q):
        return P
    if Q.includes(P):
        return Q
    H = P.hull(Q)
    if covers([P, Q], H):
        return H
    return None




def _nontrivial(rows):
    # drop tautologies such as the positivity row; keep contradictions
    return [c for c in rows if any(c[1:]) or c[0] < 0]


def _scatter(v, pos, n):
    out = [0] * n
    for i, x in zip(pos, v):
        out[i] = x
    return out
