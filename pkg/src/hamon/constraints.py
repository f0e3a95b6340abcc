"""Text grammar for linear constraints.

    constraint := expr rel expr (rel expr)*
    rel        := '<=' | '>=' | '=' | '==' | '<' | '>'
    expr       := ['-'] term (('+' | '-') term)*
    term       := factor (('*' | '/') factor)*

A term may contain at most one variable; variables are identifiers with an
optional trailing prime (``x1'`` names the derivative of ``x1``).  The
literals ``true`` and ``false`` stand for the empty conjunction and the
contradiction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .numeric import parse_rational

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*'?)|(?P<op><=|>=|==|[-+*/()<>=]))"
)

STRICT = ("<", ">")


class ConstraintSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    """``terms . x  relation  bound``; ``relation`` may be strict."""

    terms: tuple[tuple[str, Fraction], ...]
    relation: str
    bound: Fraction

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ConstraintSyntaxError(f"unexpected input at {text[pos:]!r} in {text!r}")
        pos = m.end()
        if m.group("num"):
            out.append(("num", m.group("num")))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, msg):
        raise ConstraintSyntaxError(f"{msg} in {self.text!r}")

    # linear form: dict var -> coeff, plus constant under key None
    def expr(self):
        acc: dict = {}
        sign = 1
        kind, val = self.peek()
        if (kind, val) == ("op", "-"):
            self.take()
            sign = -1
        elif (kind, val) == ("op", "+"):
            self.take()
        self._add(acc, self.term(), sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            self._add(acc, self.term(), 1 if op == "+" else -1)
        return acc

    @staticmethod
    def _add(acc, form, sign):
        for k, v in form.items():
            acc[k] = acc.get(k, Fraction(0)) + sign * v

    def term(self):
        form = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            rhs = self.factor()
            if op == "*":
                if set(form) != {None} and set(rhs) != {None}:
                    self.fail("non-linear product")
                if set(form) == {None}:
                    form, rhs = rhs, form
                c = rhs[None]
                form = {k: v * c for k, v in form.items()}
            else:
                if set(rhs) != {None}:
                    self.fail("division by a variable")
                if rhs[None] == 0:
                    self.fail("division by zero")
                form = {k: v / rhs[None] for k, v in form.items()}
        return form

    def factor(self):
        kind, val = self.take()
        if kind == "num":
            return {None: parse_rational(val)}
        if kind == "name":
            return {val: Fraction(1)}
        if (kind, val) == ("op", "("):
            form = self.expr()
            if self.take() != ("op", ")"):
                self.fail("missing ')'")
            return form
        if (kind, val) == ("op", "-"):
            return {k: -v for k, v in self.factor().items()}
        self.fail(f"unexpected token {val!r}")


def parse_atoms(text: str, allow_strict: bool = False) -> list[Atom] | None:
    """Parse one (possibly chained) constraint.  ``None`` means ``false``."""
    s = text.strip()
    if s == "true":
        return []
    if s == "false":
        return None
    p = _Parser(s)
    forms = [p.expr()]
    rels = []
    while p.i < len(p.toks):
        kind, val = p.take()
        if kind != "op" or val not in ("<=", ">=", "=", "==", "<", ">"):
            p.fail(f"expected a relation, got {val!r}")
        rel = "=" if val == "==" else val
        if rel in STRICT and not allow_strict:
            p.fail("strict relation not allowed here")
        rels.append(rel)
        forms.append(p.expr())
    if not rels:
        p.fail("missing relation")
    atoms = []
    for lhs, rel, rhs in zip(forms, rels, forms[1:]):
        diff = dict(lhs)
        _Parser._add(diff, rhs, -1)
        const = diff.pop(None, Fraction(0))
        terms = tuple(sorted((k, v) for k, v in diff.items() if v != 0))
        atoms.append(Atom(terms, rel, -const))
    return atoms


def format_atom(atom: Atom) -> str:
    from .geometry.space import format_linear
    from .numeric import format_rational

    names = [n for n, _ in atom.terms]
    coeffs = [c for _, c in atom.terms]
    return f"{format_linear(coeffs, names)} {atom.relation} {format_rational(atom.bound)}"
