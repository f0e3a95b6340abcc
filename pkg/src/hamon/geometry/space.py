from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..numeric import as_rational, format_rational

RELATIONS = ("<=", "=", ">=")


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class VarSpace:
    """Ordered set of variable names; polyhedra index coordinates by it."""

    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DimensionError(f"unknown variable {name!r} (space {self.names})") from None

    def derivatives(self) -> "VarSpace":
        return VarSpace(n + "'" for n in self.names)

    def extend(self, extra: Iterable[str]) -> "VarSpace":
        extra = [n for n in extra if n not in self._index]
        return VarSpace(self.names + tuple(extra))

    def without(self, drop: Iterable[str]) -> "VarSpace":
        drop = set(drop)
        return VarSpace(n for n in self.names if n not in drop)

    def __repr__(self) -> str:
        return f"VarSpace({list(self.names)})"


@dataclass(frozen=True)
class LinearConstraint:
    """``coefficients . x  relation  bound`` with a closed relation."""

    coefficients: tuple[Fraction, ...]
    relation: str
    bound: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.relation!r}")
        object.__setattr__(self, "coefficients", tuple(as_rational(c) for c in self.coefficients))
        object.__setattr__(self, "bound", as_rational(self.bound))

    @classmethod
    def of(cls, space: VarSpace, terms: Mapping[str, object], relation: str, bound) -> "LinearConstraint":
        coeffs = [Fraction(0)] * len(space)
        for name, c in terms.items():
            coeffs[space.index(name)] += as_rational(c)
        return cls(tuple(coeffs), relation, as_rational(bound))

    def holds(self, point) -> bool:
        lhs = sum(c * as_rational(v) for c, v in zip(self.coefficients, point))
        if self.relation == "<=":
            return lhs <= self.bound
        if self.relation == ">=":
            return lhs >= self.bound
        return lhs == self.bound

    def format(self, space: VarSpace) -> str:
        return format_linear(self.coefficients, space.names) + f" {self.relation} {format_rational(self.bound)}"


def format_linear(coeffs, names) -> str:
    parts = []
    for c, n in zip(coeffs, names):
        if c == 0:
            continue
        mag = abs(c)
        term = n if mag == 1 else f"{format_rational(mag)}*{n}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


@dataclass(frozen=True)
class IntervalUpdate:
    """Partial map variable -> closed interval [lo, hi]."""

    bounds: tuple[tuple[str, Fraction, Fraction], ...] = ()

    def __init__(self, mapping: Mapping[str, tuple] | Iterable[tuple] = ()):
        items = mapping.items() if isinstance(mapping, Mapping) else ((v, (lo, hi)) for v, lo, hi in mapping)
        out = []
        for var, (lo, hi) in items:
            lo, hi = as_rational(lo), as_rational(hi)
            if lo > hi:
                raise ValueError(f"invalid update interval for {var}: [{lo}, {hi}]")
            out.append((var, lo, hi))
        out.sort()
        object.__setattr__(self, "bounds", tuple(out))

    def __bool__(self) -> bool:
        return bool(self.bounds)

    def __iter__(self):
        return iter(self.bounds)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _, _ in self.bounds)

    def as_dict(self) -> dict[str, tuple[Fraction, Fraction]]:
        return {v: (lo, hi) for v, lo, hi in self.bounds}
