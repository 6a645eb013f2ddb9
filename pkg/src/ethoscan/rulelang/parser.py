"""Parser and static validation for the rule DSL.

Surface syntax::

    # comment to end of line
    licensed(R) :- has_root_license(R).
    stale(R) :- eval_date(E), release_date(R, D), days_between(D, E, N), gt(N, 183).
    flagged(R) :- repo(R), not licensed(R).

Heads and body atoms use lowercase predicate names; variables start
with an uppercase letter; constants are double-quoted strings, signed
integers, or bare ISO dates (2021-07-05).  Validation enforces range
restriction (every variable in a head, negated atom, or builtin must be
bound by a positive body atom, with days_between allowed to bind its
third argument) and stratified negation.
"""

from __future__ import annotations

import re
from datetime import date
from typing import Optional

from ..errors import DuplicateRuleError, RuleParseError, StratificationError, UnsafeVariableError
from .model import Atom, BodyLiteral, Rule, RuleSet, Var

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<implies>:-)
  | (?P<date>\d{4}-\d{2}-\d{2})
  | (?P<int>-?\d+)
  | (?P<var>[A-Z]\w*)
  | (?P<ident>[a-z]\w*)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)

_BINDING_BUILTIN = "days_between"  # may bind its third argument

# Builtin names; the engine owns their semantics, the parser only needs
# the names and arities for safety checks.
BUILTIN_ARITIES = {
    "string_contains": 2,
    "regex_match": 2,
    "date_before": 2,
    "days_between": 3,
    "lt": 2,
    "gt": 2,
    "eq": 2,
    "starts_with": 2,
}


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind: str, value, line: int, column: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        raw = m.group()
        col = pos - line_start + 1
        if kind == "ws" or kind == "comment":
            pass
        elif kind == "date":
            try:
                tokens.append(_Token("const", date.fromisoformat(raw), line, col))
            except ValueError:
                raise RuleParseError(f"invalid date literal {raw!r}", line, col) from None
        elif kind == "int":
            tokens.append(_Token("const", int(raw), line, col))
        elif kind == "string":
            body = raw[1:-1]
            # only \" and \\ are escapes; other backslashes stay literal
            # so regex patterns can be written without doubling
            value = re.sub(r'\\([\\"])', lambda e: e.group(1), body)
            tokens.append(_Token("const", value, line, col))
        elif kind == "var":
            tokens.append(_Token("var", raw, line, col))
        elif kind == "ident":
            tokens.append(_Token("ident", raw, line, col))
        elif kind == "implies":
            tokens.append(_Token(":-", raw, line, col))
        else:
            tokens.append(_Token(raw, raw, line, col))
        if "\n" in raw:
            line += raw.count("\n")
            line_start = m.start() + raw.rindex("\n") + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.column if last else 1
            raise RuleParseError(f"unexpected end of input (expected {expected})", line, col)
        if expected is not None and tok.kind != expected:
            raise RuleParseError(f"expected {expected!r}, found {tok.value!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def parse_program(self) -> list[tuple[Rule, int, int]]:
        rules = []
        while self.peek() is not None:
            rules.append(self.parse_rule())
        return rules

    def parse_rule(self) -> tuple[Rule, int, int]:
        start = self.peek()
        head = self.parse_atom()
        body: list[BodyLiteral] = []
        tok = self.peek()
        if tok is not None and tok.kind == ":-":
            self.next()
            body.append(self.parse_literal())
            while self.peek() is not None and self.peek().kind == ",":
                self.next()
                body.append(self.parse_literal())
        self.next(".")
        return Rule(head, tuple(body)), start.line, start.column

    def parse_literal(self) -> BodyLiteral:
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.value == "not":
            self.next()
            return BodyLiteral(self.parse_atom(), negated=True)
        return BodyLiteral(self.parse_atom())

    def parse_atom(self) -> Atom:
        name = self.next("ident")
        args = []
        tok = self.peek()
        if tok is not None and tok.kind == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek() is not None and self.peek().kind == ",":
                self.next()
                args.append(self.parse_term())
            self.next(")")
        return Atom(name.value, tuple(args))

    def parse_term(self):
        tok = self.peek()
        if tok is None:
            raise RuleParseError("unexpected end of input in term", 1, 1)
        if tok.kind == "var":
            self.next()
            return Var(tok.value)
        if tok.kind == "const":
            self.next()
            return tok.value
        raise RuleParseError(f"expected a term, found {tok.value!r}", tok.line, tok.column)


def _check_safety(rule: Rule) -> None:
    safe: set[str] = set()
    for lit in rule.body:
        if not lit.negated and lit.atom.predicate not in BUILTIN_ARITIES:
            safe |= lit.atom.variables()
    # days_between may bind its third argument once the first two are safe
    changed = True
    while changed:
        changed = False
        for lit in rule.body:
            if lit.negated or lit.atom.predicate != _BINDING_BUILTIN or lit.atom.arity != 3:
                continue
            first_two = {a.name for a in lit.atom.args[:2] if isinstance(a, Var)}
            out = lit.atom.args[2]
            if first_two <= safe and isinstance(out, Var) and out.name not in safe:
                safe.add(out.name)
                changed = True

    def check(vars_needed: set[str]) -> None:
        for v in sorted(vars_needed):
            if v not in safe:
                raise UnsafeVariableError(v, str(rule))

    check(rule.head.variables())
    for lit in rule.body:
        if lit.negated or lit.atom.predicate in BUILTIN_ARITIES:
            check(lit.atom.variables())


def _stratify(rules: list[Rule]) -> tuple[tuple[Rule, ...], ...]:
    heads = {r.head.predicate for r in rules}
    # edges: body predicate -> head predicate, flagged negative under "not"
    edges: dict[str, set[tuple[str, bool]]] = {p: set() for p in heads}
    for r in rules:
        for lit in r.body:
            p = lit.atom.predicate
            if p in BUILTIN_ARITIES or p not in heads:
                continue
            edges[p].add((r.head.predicate, lit.negated))

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: dict[str, bool] = {}
    stack: list[str] = []
    sccs: list[list[str]] = []
    scc_of: dict[str, int] = {}
    counter = [0]

    def strongconnect(v: str) -> None:
        # iterative Tarjan to stay clear of recursion limits
        work = [(v, iter(sorted(edges[v])))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack[v] = True
        while work:
            node, it = work[-1]
            advanced = False
            for succ, _neg in it:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack[succ] = True
                    work.append((succ, iter(sorted(edges[succ]))))
                    advanced = True
                    break
                if on_stack.get(succ):
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    scc_of[w] = len(sccs)
                    if w == node:
                        break
                sccs.append(comp)

    for p in sorted(heads):
        if p not in index:
            strongconnect(p)

    for src, outs in edges.items():
        for dst, negated in outs:
            if negated and scc_of[src] == scc_of[dst]:
                raise StratificationError(sorted(sccs[scc_of[src]]))

    stratum: dict[str, int] = {p: 0 for p in heads}
    for _ in range(len(heads) + 1):
        changed = False
        for r in rules:
            h = r.head.predicate
            for lit in r.body:
                p = lit.atom.predicate
                if p in BUILTIN_ARITIES or p not in heads:
                    continue
                need = stratum[p] + (1 if lit.negated else 0)
                if stratum[h] < need:
                    stratum[h] = need
                    changed = True
        if not changed:
            break

    buckets: dict[int, list[Rule]] = {}
    for r in rules:
        buckets.setdefault(stratum[r.head.predicate], []).append(r)
    return tuple(tuple(buckets[s]) for s in sorted(buckets))


def parse_rules(text: str) -> RuleSet:
    """Parse and validate a rule program into an evaluation-ready RuleSet."""
    parser = _Parser(_lex(text))
    parsed = parser.parse_program()

    arities: dict[str, int] = dict(BUILTIN_ARITIES)
    seen: set[Rule] = set()
    for rule, line, column in parsed:
        if rule in seen:
            raise DuplicateRuleError(f"duplicate rule at {line}:{column}: {rule}")
        seen.add(rule)
        for atom in [rule.head] + [lit.atom for lit in rule.body]:
            known = arities.get(atom.predicate)
            if known is None:
                arities[atom.predicate] = atom.arity
            elif known != atom.arity:
                raise RuleParseError(
                    f"predicate {atom.predicate!r} used with arity {atom.arity}, previously {known}",
                    line, column,
                )
        if rule.head.predicate in BUILTIN_ARITIES:
            raise RuleParseError(f"cannot define builtin {rule.head.predicate!r}", line, column)
        _check_safety(rule)

    rules = [r for r, _, _ in parsed]
    return RuleSet(tuple(rules), _stratify(rules))


def parse_literal(text: str) -> BodyLiteral:
    """Parse a single ground or non-ground body literal, e.g. a trace entry."""
    parser = _Parser(_lex(text))
    lit = parser.parse_literal()
    if parser.peek() is not None:
        tok = parser.peek()
        raise RuleParseError(f"trailing input after literal: {tok.value!r}", tok.line, tok.column)
    return lit
