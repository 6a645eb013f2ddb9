"""Semi-naive bottom-up evaluation with stratified negation.

Facts are kept in insertion-ordered dicts and base facts are sorted on
entry, so two runs over the same inputs derive facts in the same order
regardless of hash seeding.  That makes witness selection (the rule
trace attached to each derived fact) reproducible byte for byte.
"""

from __future__ import annotations

import re
from datetime import date
from typing import Callable, Iterable, Mapping, Optional

from ..errors import BuiltinTypeError, FuelExhaustedError, UnknownPredicateError
from .model import Atom, BodyLiteral, Rule, RuleSet, Var, tuple_sort_key
from .parser import BUILTIN_ARITIES

DEFAULT_FUEL = 1_000_000

GroundTuple = tuple
FactIndex = dict[str, dict[GroundTuple, None]]  # ordered set per predicate


def _require_str(name: str, value) -> str:
    if not isinstance(value, str):
        raise BuiltinTypeError(f"{name} expects strings, got {value!r}")
    return value


def _require_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BuiltinTypeError(f"{name} expects integers, got {value!r}")
    return value


def _require_date(name: str, value) -> date:
    if not isinstance(value, date):
        raise BuiltinTypeError(f"{name} expects dates, got {value!r}")
    return value


def _bi_string_contains(s, sub) -> bool:
    return _require_str("string_contains", sub) in _require_str("string_contains", s)


def _bi_regex_match(s, pattern) -> bool:
    return re.search(_require_str("regex_match", pattern), _require_str("regex_match", s)) is not None


def _bi_date_before(d1, d2) -> bool:
    return _require_date("date_before", d1) < _require_date("date_before", d2)


def _bi_lt(a, b) -> bool:
    return _require_int("lt", a) < _require_int("lt", b)


def _bi_gt(a, b) -> bool:
    return _require_int("gt", a) > _require_int("gt", b)


def _bi_eq(a, b) -> bool:
    return type(a) is type(b) and a == b


def _bi_starts_with(s, prefix) -> bool:
    return _require_str("starts_with", s).startswith(_require_str("starts_with", prefix))


BUILTINS: dict[str, Callable[..., bool]] = {
    "string_contains": _bi_string_contains,
    "regex_match": _bi_regex_match,
    "date_before": _bi_date_before,
    "lt": _bi_lt,
    "gt": _bi_gt,
    "eq": _bi_eq,
    "starts_with": _bi_starts_with,
}


def _days_between(d1, d2) -> int:
    return (_require_date("days_between", d2) - _require_date("days_between", d1)).days


class Witness:
    """Ground body literals of the rule application that derived a fact."""

    __slots__ = ("rule", "literals")

    def __init__(self, rule: Rule, literals: tuple[BodyLiteral, ...]):
        self.rule = rule
        self.literals = literals

    def render(self) -> tuple[str, ...]:
        return tuple(str(lit) for lit in self.literals)


class DerivedFacts:
    """Result of an evaluation: derived facts plus one witness each."""

    def __init__(self, derived: FactIndex, base: FactIndex, witnesses: dict[tuple[str, GroundTuple], Witness]):
        self._derived = derived
        self._base = base
        self._witnesses = witnesses

    def tuples(self, predicate: str) -> tuple[GroundTuple, ...]:
        """Derived tuples for a predicate, in derivation order."""
        return tuple(self._derived.get(predicate, {}))

    def predicates(self) -> tuple[str, ...]:
        return tuple(sorted(p for p, facts in self._derived.items() if facts))

    def holds(self, predicate: str, values: GroundTuple) -> bool:
        return values in self._derived.get(predicate, {}) or values in self._base.get(predicate, {})

    def witness(self, predicate: str, values: GroundTuple) -> Optional[Witness]:
        return self._witnesses.get((predicate, values))

    def as_sets(self) -> dict[str, frozenset]:
        return {p: frozenset(facts) for p, facts in self._derived.items() if facts}


def _ground(atom: Atom, binding: Mapping[str, object]) -> Atom:
    args = tuple(binding[a.name] if isinstance(a, Var) else a for a in atom.args)
    return Atom(atom.predicate, args)


def _match(atom: Atom, fact: GroundTuple, binding: dict) -> Optional[dict]:
    out = binding
    copied = False
    for pattern, value in zip(atom.args, fact):
        if isinstance(pattern, Var):
            bound = out.get(pattern.name, _ABSENT)
            if bound is _ABSENT:
                if not copied:
                    out = dict(out)
                    copied = True
                out[pattern.name] = value
            elif type(bound) is not type(value) or bound != value:
                return None
        elif type(pattern) is not type(value) or pattern != value:
            return None
    return out


_ABSENT = object()


class _Evaluator:
    def __init__(self, ruleset: RuleSet, base_facts: Mapping[str, Iterable[GroundTuple]], fuel: int):
        self.ruleset = ruleset
        self.fuel = fuel
        heads = ruleset.head_predicates
        for rule in ruleset.rules:
            for lit in rule.body:
                p = lit.atom.predicate
                if p not in heads and p not in BUILTIN_ARITIES and p not in base_facts:
                    raise UnknownPredicateError(p)

        self.base: FactIndex = {}
        for pred in sorted(base_facts):
            rows = sorted(set(map(tuple, base_facts[pred])), key=tuple_sort_key)
            self.base[pred] = {row: None for row in rows}
        self.derived: FactIndex = {p: {} for p in heads}
        self.witnesses: dict[tuple[str, GroundTuple], Witness] = {}

    def _spend(self) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhaustedError("evaluation fuel exhausted; this indicates an engine bug")

    def _all_rows(self, predicate: str) -> Iterable[GroundTuple]:
        yield from self.base.get(predicate, {})
        yield from self.derived.get(predicate, {})

    def _literal_true(self, lit: BodyLiteral, binding: dict) -> bool:
        """Evaluate a ground (or groundable builtin) literal under a binding."""
        atom = lit.atom
        pred = atom.predicate
        if pred in BUILTIN_ARITIES:
            raise AssertionError("builtins handled separately")
        values = tuple(binding[a.name] if isinstance(a, Var) else a for a in atom.args)
        present = values in self.base.get(pred, {}) or values in self.derived.get(pred, {})
        return not present if lit.negated else present

    def _eval_builtin(self, lit: BodyLiteral, binding: dict) -> Optional[dict]:
        atom = lit.atom
        args = [binding[a.name] if isinstance(a, Var) and a.name in binding else a for a in atom.args]
        if atom.predicate == "days_between":
            out = args[2]
            if isinstance(out, Var):
                days = _days_between(args[0], args[1])
                if lit.negated:
                    raise AssertionError("negated days_between cannot bind")
                new = dict(binding)
                new[out.name] = days
                return new
            ok = _days_between(args[0], args[1]) == _require_int("days_between", out)
        else:
            fn = BUILTINS[atom.predicate]
            ok = fn(*args)
        if lit.negated:
            ok = not ok
        return binding if ok else None

    def _expand(self, rule: Rule, delta_index: Optional[int], delta: FactIndex) -> list[tuple[GroundTuple, Witness]]:
        """All head instantiations of one rule; semi-naive when delta_index is set."""
        positives = [
            (i, lit) for i, lit in enumerate(rule.body)
            if not lit.negated and lit.atom.predicate not in BUILTIN_ARITIES
        ]
        deferred = [
            lit for lit in rule.body
            if lit.negated or lit.atom.predicate in BUILTIN_ARITIES
        ]

        bindings: list[dict] = [{}]
        for i, lit in positives:
            self._spend()
            if delta_index is not None and i == delta_index:
                rows: Iterable[GroundTuple] = delta.get(lit.atom.predicate, {})
            else:
                rows = self._all_rows(lit.atom.predicate)
            rows = list(rows)
            next_bindings = []
            for b in bindings:
                for row in rows:
                    if len(row) != lit.atom.arity:
                        continue
                    nb = _match(lit.atom, row, b)
                    if nb is not None:
                        next_bindings.append(nb)
            bindings = next_bindings
            if not bindings:
                return []

        results: list[tuple[GroundTuple, Witness]] = []
        for b in bindings:
            self._spend()
            binding = self._check_deferred(rule, deferred, b)
            if binding is None:
                continue
            head_vals = tuple(
                binding[a.name] if isinstance(a, Var) else a for a in rule.head.args
            )
            ground_body = tuple(
                BodyLiteral(_ground(lit.atom, binding), lit.negated) for lit in rule.body
            )
            results.append((head_vals, Witness(rule, ground_body)))
        return results

    def _check_deferred(self, rule: Rule, deferred: list[BodyLiteral], binding: dict) -> Optional[dict]:
        """Evaluate negations and builtins; passes repeat so days_between
        can bind values consumed by later literals.  Returns the final
        binding, or None when some literal is false."""
        pending = list(deferred)
        while pending:
            progressed = False
            still: list[BodyLiteral] = []
            for lit in pending:
                status, binding = self._try_literal(lit, binding)
                if status is False:
                    return None
                if status is None:
                    still.append(lit)
                else:
                    progressed = True
            pending = still
            if pending and not progressed:
                raise AssertionError(f"unbindable literal arguments in {rule}")
        return binding

    def _try_literal(self, lit: BodyLiteral, binding: dict):
        """Returns (True, binding'), (False, binding), or (None, binding) to defer."""
        unbound = [a.name for a in lit.atom.args if isinstance(a, Var) and a.name not in binding]
        if lit.atom.predicate in BUILTIN_ARITIES:
            out = lit.atom.args[2] if lit.atom.arity == 3 else None
            bindable = (
                lit.atom.predicate == "days_between"
                and not lit.negated
                and isinstance(out, Var)
                and unbound == [out.name]
            )
            if unbound and not bindable:
                return None, binding
            new_binding = self._eval_builtin(lit, binding)
            if new_binding is None:
                return False, binding
            return True, new_binding
        if unbound:
            return None, binding
        return (True, binding) if self._literal_true(lit, binding) else (False, binding)

    def run(self) -> DerivedFacts:
        for stratum in self.ruleset.strata:
            stratum_heads = {r.head.predicate for r in stratum}
            delta: FactIndex = {p: {} for p in stratum_heads}

            def absorb(pred: str, rows: list[tuple[GroundTuple, Witness]], into: FactIndex) -> bool:
                added = False
                for values, witness in rows:
                    if values in self.derived[pred] or values in self.base.get(pred, {}):
                        continue
                    self.derived[pred][values] = None
                    into[pred][values] = None
                    self.witnesses.setdefault((pred, values), witness)
                    added = True
                return added

            # first round: full join
            for rule in stratum:
                absorb(rule.head.predicate, self._expand(rule, None, {}), delta)

            # subsequent rounds: delta-driven
            while any(delta[p] for p in delta):
                self._spend()
                new_delta: FactIndex = {p: {} for p in stratum_heads}
                for rule in stratum:
                    recursive_positions = [
                        i for i, lit in enumerate(rule.body)
                        if not lit.negated
                        and lit.atom.predicate in stratum_heads
                    ]
                    for i in recursive_positions:
                        absorb(rule.head.predicate, self._expand(rule, i, delta), new_delta)
                delta = new_delta
        return DerivedFacts(self.derived, self.base, self.witnesses)


def evaluate(
    ruleset: RuleSet,
    base_facts: Mapping[str, Iterable[GroundTuple]],
    fuel: int = DEFAULT_FUEL,
) -> DerivedFacts:
    """Least fixpoint of the rule set over the base facts, stratum by stratum.

    Deterministic: identical inputs yield identical derived facts,
    derivation order, and witnesses.
    """
    return _Evaluator(ruleset, base_facts, fuel).run()


def literal_holds(
    lit: BodyLiteral,
    base_facts: Mapping[str, Iterable[GroundTuple]],
    derived: Optional[DerivedFacts] = None,
) -> bool:
    """Check one ground literal against base plus derived facts.

    Used to re-validate violation rule traces: every positive entry must
    be present, every negated entry absent, and every builtin must hold.
    """
    atom = lit.atom
    if atom.predicate in BUILTIN_ARITIES:
        args = list(atom.args)
        if any(isinstance(a, Var) for a in args):
            raise BuiltinTypeError(f"literal is not ground: {lit}")
        if atom.predicate == "days_between":
            ok = _days_between(args[0], args[1]) == _require_int("days_between", args[2])
        else:
            ok = BUILTINS[atom.predicate](*args)
        return not ok if lit.negated else ok
    values = tuple(atom.args)
    in_base = any(tuple(row) == values for row in base_facts.get(atom.predicate, ()))
    in_derived = derived.holds(atom.predicate, values) if derived is not None else False
    present = in_base or in_derived
    return not present if lit.negated else present
