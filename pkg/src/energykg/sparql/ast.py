"""AST for the SELECT query subset.

Groups parse to a left-deep Join of their elements with FILTERs wrapped
around the whole group. Sequence property paths stay in the tree; the
evaluator lowers them to triple patterns with fresh variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..terms import Iri, Literal, PrefixMap, Term

# The alias some engines use for the store's default graph.
DEFAULT_GRAPH_ALIAS = "urn:x-arq:DefaultGraph"


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, slots=True)
class SequencePath:
    left: "PathExpr"
    right: "PathExpr"


PathExpr = Union[Iri, SequencePath]

PatternTerm = Union[Term, Variable]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: PatternTerm
    predicate: Union[Iri, Variable, SequencePath]
    object: PatternTerm


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Constant:
    value: Union[Literal, Iri]


@dataclass(frozen=True, slots=True)
class Equals:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True, slots=True)
class And:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True, slots=True)
class DateFunc:
    component: str  # "year" | "month" | "day"
    argument: "Expression"


Expression = Union[Variable, Constant, Equals, And, DateFunc]


# -- graph patterns ----------------------------------------------------------


@dataclass(frozen=True)
class BGP:
    patterns: tuple[TriplePattern, ...]


@dataclass(frozen=True)
class Graph:
    name: Iri
    pattern: "GraphPattern"


@dataclass(frozen=True)
class Filter:
    expression: Expression
    pattern: "GraphPattern"


@dataclass(frozen=True)
class Join:
    left: "GraphPattern"
    right: "GraphPattern"


GraphPattern = Union[BGP, Graph, Filter, Join]


def pattern_variables(pattern: GraphPattern) -> frozenset[str]:
    """Statically in-scope variable names of a graph pattern."""
    if isinstance(pattern, BGP):
        names = set()
        for tp in pattern.patterns:
            for position in (tp.subject, tp.predicate, tp.object):
                if isinstance(position, Variable):
                    names.add(position.name)
        return frozenset(names)
    if isinstance(pattern, Graph):
        return pattern_variables(pattern.pattern)
    if isinstance(pattern, Filter):
        return pattern_variables(pattern.pattern)
    return pattern_variables(pattern.left) | pattern_variables(pattern.right)


def expression_variables(expression: Expression) -> frozenset[str]:
    if isinstance(expression, Variable):
        return frozenset({expression.name})
    if isinstance(expression, Constant):
        return frozenset()
    if isinstance(expression, DateFunc):
        return expression_variables(expression.argument)
    return expression_variables(expression.left) | expression_variables(expression.right)


@dataclass(frozen=True)
class DatasetClause:
    named: bool
    graph: Iri


@dataclass(frozen=True)
class SelectQuery:
    projection: tuple[Variable, ...]
    pattern: GraphPattern
    base: Optional[Iri] = None
    prefixes: PrefixMap = field(default_factory=PrefixMap)
    dataset_clauses: tuple[DatasetClause, ...] = ()
    limit: Optional[int] = None


@dataclass
class SolutionSequence:
    """Projected result rows in deterministic order."""

    variables: tuple[str, ...]
    rows: list[dict[str, Term]]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)
