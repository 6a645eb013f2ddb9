"""Horn-rule DSL: datalog-style rules with stratified negation and builtins."""

from .model import Atom, BodyLiteral, Rule, RuleSet, Var, render_term
from .parser import parse_literal, parse_rules
from .engine import BUILTINS, DerivedFacts, evaluate, literal_holds

__all__ = [
    "Atom", "BodyLiteral", "Rule", "RuleSet", "Var", "render_term",
    "parse_rules", "parse_literal",
    "BUILTINS", "DerivedFacts", "evaluate", "literal_holds",
]
