"""Syntax tree for the rule DSL.

Terms are variables or ground constants (strings, integers, calendar
dates).  No function symbols exist, so the set of derivable facts is
finite and evaluation always terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, str, int, date]


def render_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, str):
        escaped = term.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(term, bool):  # bools are not valid terms; guard against surprises
        raise TypeError("boolean is not a rule term")
    if isinstance(term, int):
        return str(term)
    if isinstance(term, date):
        return term.isoformat()
    raise TypeError(f"not a rule term: {term!r}")


def term_sort_key(term: Term):
    """Total order over ground terms so evaluation order is reproducible."""
    if isinstance(term, bool):
        raise TypeError("boolean is not a rule term")
    if isinstance(term, int):
        return (0, term)
    if isinstance(term, str):
        return (1, term)
    if isinstance(term, date):
        return (2, term.toordinal())
    raise TypeError(f"not a ground term: {term!r}")


def tuple_sort_key(values: tuple) -> tuple:
    return tuple(term_sort_key(v) for v in values)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> set[str]:
        return {a.name for a in self.args if isinstance(a, Var)}

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(render_term(a) for a in self.args)})"


@dataclass(frozen=True)
class BodyLiteral:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[BodyLiteral, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True)
class RuleSet:
    """Validated rules plus their computed stratum evaluation order."""

    rules: tuple[Rule, ...]
    strata: tuple[tuple[Rule, ...], ...]

    @property
    def head_predicates(self) -> frozenset[str]:
        return frozenset(r.head.predicate for r in self.rules)

    def __len__(self) -> int:
        return len(self.rules)
