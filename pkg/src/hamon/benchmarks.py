"""Built-in adaptive-cruise-control automata.

* ``ACCI``: two cars, interval velocities, violation monitor for ``x1 - x2 > 0``.
* ``ACCD(dim, eps)``: ``dim`` cars with diagonal velocity constraints; each
  gap is either cruising or recovering (slowed down by ``eps``).
* ``ACCC(dim)``: ``dim`` cars with constant velocities per mode, one
  recovery mode per gap and an unreachable accepting ``unsafe`` sink.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .geometry import Polyhedron, VarSpace
from .model import Edge, Lha, Location, against_safety, poly, spec_from_strings
from .numeric import format_rational, parse_rational

ACCD_DIMS = range(2, 8)
ACCC_DIMS = (5, 10, 15)


def platoon() -> Lha:
    """Two-car bounding model: ``l0`` the follower is faster, ``l1`` the leader."""
    X = VarSpace(["x1", "x2"])
    D = X.derivatives()
    l0 = Location(
        "l0",
        poly(D, ["7.5 <= x1' <= 8.5", "8 <= x2' <= 9"]),
        Polyhedron.universe(X),
        poly(X, ["x1 = 40", "x2 = 35"]),
    )
    l1 = Location(
        "l1",
        poly(D, ["11 <= x1' <= 13", "9 <= x2' <= 11"]),
        Polyhedron.universe(X),
        Polyhedron.empty(X),
    )
    edges = [
        Edge("l0", poly(X, "x1 - x2 <= 4"), "l1"),
        Edge("l1", poly(X, "x1 - x2 >= 4"), "l0"),
    ]
    return Lha(X, [l0, l1], edges)


def acci() -> Lha:
    return against_safety(platoon(), spec_from_strings(["x1 - x2 > 0"]))


def _cars(dim: int) -> VarSpace:
    return VarSpace(f"x{i}" for i in range(1, dim + 1))


def accd_base(dim: int, eps: Fraction) -> Lha:
    """Bounding model without the safety monitor (``2**(dim-1)`` modes)."""
    if dim not in ACCD_DIMS:
        raise ValueError(f"ACCD dimension must be in 2..7, got {dim}")
    X = _cars(dim)
    D = X.derivatives()
    e = format_rational(eps)
    gaps = range(1, dim)

    def name(modes):
        return "-".join("cruise" if m == "c" else "recover" for m in modes)

    locs, edges = [], []
    for modes in itertools.product("cr", repeat=dim - 1):
        flow = ["x1' = 36"] + [f"x{j}' >= 0" for j in range(2, dim + 1)]
        inv = []
        for i, m in zip(gaps, modes):
            rel = f"x{i}' - x{i + 1}'"
            if m == "c":
                flow.append(f"-1 <= {rel} <= 1")
                inv.append(f"x{i} - x{i + 1} >= 1")
            else:
                flow.append(f"{e} - 1 <= {rel} <= {e} + 1")
                inv.append(f"x{i} - x{i + 1} <= 3")
        init = Polyhedron.empty(X)
        if set(modes) == {"c"}:
            init = poly(X, [f"x{i} = {3 * (dim - i)}" for i in range(1, dim + 1)])
        locs.append(Location(name(modes), poly(D, flow), poly(X, inv), init))
        for k, (i, m) in enumerate(zip(gaps, modes)):
            flipped = modes[:k] + ("r" if m == "c" else "c",) + modes[k + 1 :]
            guard = f"x{i} - x{i + 1} <= 2" if m == "c" else f"x{i} - x{i + 1} >= 2"
            edges.append(Edge(name(modes), poly(X, guard), name(flipped)))
    return Lha(X, locs, edges)


def accd(dim: int, eps) -> Lha:
    eps = Fraction(eps) if not isinstance(eps, str) else parse_rational(eps)
    base = accd_base(dim, eps)
    spec = spec_from_strings([f"x{i} - x{i + 1} > 0" for i in range(1, dim)])
    return against_safety(base, spec)


def _cruise_rate(i: int) -> Fraction:
    return 8 + Fraction(i - 1, 2)


def accc(dim: int) -> Lha:
    if dim not in ACCC_DIMS:
        raise ValueError(f"ACCC dimension must be one of {ACCC_DIMS}, got {dim}")
    X = _cars(dim)
    D = X.derivatives()
    gaps = range(1, dim)

    def rates(vals):
        return poly(D, [f"x{j}' = {format_rational(v)}" for j, v in enumerate(vals, 1)])

    def gap_bounds(lo):
        return poly(X, [f"{lo} <= x{i} - x{i + 1} <= 10" for i in gaps])

    cruise = Location(
        "cruise",
        rates([_cruise_rate(j) for j in range(1, dim + 1)]),
        gap_bounds(2),
        poly(X, [f"x{i} = {40 - 5 * (i - 1)}" for i in range(1, dim + 1)]),
    )
    locs = [cruise]
    edges = []
    for k in gaps:
        vals = []
        for j in range(1, dim + 1):
            if j <= k:
                vals.append(Fraction(12))
            elif j == k + 1:
                vals.append(Fraction(10))
            else:
                vals.append(_cruise_rate(k) + (j - k - 2))
        locs.append(Location(f"rec{k}", rates(vals), gap_bounds(0), Polyhedron.empty(X)))
        gap = f"x{k} - x{k + 1}"
        edges.append(Edge("cruise", poly(X, f"{gap} <= 4"), f"rec{k}"))
        edges.append(Edge(f"rec{k}", poly(X, f"{gap} >= 4"), "cruise"))
        edges.append(Edge(f"rec{k}", poly(X, f"{gap} <= 1"), "unsafe"))
    locs.append(
        Location(
            "unsafe",
            rates([0] * dim),
            Polyhedron.universe(X),
            Polyhedron.empty(X),
            accepting=True,
        )
    )
    return Lha(X, locs, edges)


_CALL = re.compile(r"\s*(ACC[ICD])\s*(?:\(\s*([^)]*)\))?\s*", re.IGNORECASE)


def builtin_model(name: str) -> Lha:
    """``"ACCI"``, ``"ACCD(2, 9/10)"``, ``"ACCD(3,2.0)"`` or ``"ACCC(5)"``."""
    m = _CALL.fullmatch(name)
    if not m:
        raise ValueError(f"unknown builtin model {name!r}")
    kind = m.group(1).upper()
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    if kind == "ACCI":
        if args:
            raise ValueError("ACCI takes no arguments")
        return acci()
    if kind == "ACCD":
        if len(args) != 2:
            raise ValueError("ACCD expects (dim, eps)")
        return accd(int(args[0]), parse_rational(args[1]))
    if len(args) != 1:
        raise ValueError("ACCC expects (dim)")
    return accc(int(args[0]))


BUILTIN_NAMES = ("ACCI", "ACCD(dim, eps)", "ACCC(dim)")
