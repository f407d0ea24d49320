"""Bottom-up evaluation of the query subset over a frozen Dataset.

Semantics: a BGP yields every homomorphism into the active graph; Join
merges compatible bindings; GRAPH switches the active graph; FILTER
keeps rows whose expression evaluates to true, dropping rows whose
expression errors. Results are projected, sorted by the canonical
encoding of their bindings, and cut by LIMIT, in that order.

Joins are hash-based on the statically shared variables; a FILTER whose
conjuncts equate date components across the two sides of a Join is
turned into an equi-join key so day-alignment queries stay linear.
"""

from __future__ import annotations

from decimal import Decimal
from itertools import count
from typing import Iterator, Optional, Union

from ..dataset import ANY, Dataset
from ..errors import EnergyKgError
from ..terms import (
    BlankNode,
    GraphName,
    Iri,
    Literal,
    NUMERIC_DATATYPES,
    Quad,
    Term,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_STRING,
    parse_datetime,
    parse_numeric,
    term_key,
)
from .ast import (
    And,
    BGP,
    Constant,
    DEFAULT_GRAPH_ALIAS,
    DateFunc,
    Equals,
    Expression,
    Filter,
    Graph,
    GraphPattern,
    Join,
    SelectQuery,
    SequencePath,
    SolutionSequence,
    TriplePattern,
    Variable,
    expression_variables,
    pattern_variables,
)

Row = dict[str, Term]


class EvaluationError(EnergyKgError):
    """Raised for dataset-level problems, not per-row expression errors."""


class _ExprError(Exception):
    """Per-row expression failure; the row is dropped by FILTER."""


def evaluate(ds: Dataset, query: SelectQuery) -> SolutionSequence:
    default_graphs, named_graphs = _resolve_dataset(ds, query)
    fresh = count()
    rows = _eval_pattern(query.pattern, default_graphs, named_graphs, ds, fresh)

    names = tuple(v.name for v in query.projection)
    projected = [{name: row[name] for name in names if name in row} for row in rows]
    projected.sort(key=lambda row: tuple(term_key(row[n]) if n in row else "" for n in names))
    if query.limit is not None:
        projected = projected[: query.limit]
    return SolutionSequence(names, projected)


def _resolve_dataset(
    ds: Dataset, query: SelectQuery
) -> tuple[tuple[GraphName, ...], frozenset[Iri]]:
    if not query.dataset_clauses:
        return (None,), frozenset(ds.graphs())
    defaults: list[GraphName] = []
    named: list[Iri] = []
    for clause in query.dataset_clauses:
        alias = clause.graph.value == DEFAULT_GRAPH_ALIAS
        if clause.named:
            if not alias:
                named.append(clause.graph)
        else:
            defaults.append(None if alias else clause.graph)
    return tuple(dict.fromkeys(defaults)), frozenset(named)


# -- pattern evaluation ------------------------------------------------------


def _eval_pattern(
    pattern: GraphPattern,
    active: tuple[GraphName, ...],
    named: frozenset[Iri],
    ds: Dataset,
    fresh: "count[int]",
) -> list[Row]:
    if isinstance(pattern, BGP):
        return _eval_bgp(pattern, active, ds, fresh)
    if isinstance(pattern, Graph):
        if pattern.name.value == DEFAULT_GRAPH_ALIAS:
            return _eval_pattern(pattern.pattern, active, named, ds, fresh)
        if pattern.name not in named:
            return []
        return _eval_pattern(pattern.pattern, (pattern.name,), named, ds, fresh)
    if isinstance(pattern, Join):
        left = _eval_pattern(pattern.left, active, named, ds, fresh)
        if not left:
            return []
        right = _eval_pattern(pattern.right, active, named, ds, fresh)
        shared = sorted(pattern_variables(pattern.left) & pattern_variables(pattern.right))
        return _hash_join(left, right, shared)
    if isinstance(pattern, Filter):
        return _eval_filter(pattern, active, named, ds, fresh)
    raise EvaluationError(f"unknown pattern node {pattern!r}")


def _lower_paths(
    patterns: tuple[TriplePattern, ...], fresh: "count[int]"
) -> Iterator[TriplePattern]:
    """Rewrite p1/p2 into two patterns over a fresh, non-projectable variable."""
    for tp in patterns:
        if isinstance(tp.predicate, SequencePath):
            # Fresh names contain NUL, which the grammar cannot produce.
            mid = Variable(f"\x00path{next(fresh)}")
            yield from _lower_paths(
                (TriplePattern(tp.subject, tp.predicate.left, mid),), fresh
            )
            yield from _lower_paths(
                (TriplePattern(mid, tp.predicate.right, tp.object),), fresh
            )
        else:
            yield tp


def _eval_bgp(
    bgp: BGP, active: tuple[GraphName, ...], ds: Dataset, fresh: "count[int]"
) -> list[Row]:
    rows: list[Row] = [{}]
    for tp in _lower_paths(bgp.patterns, fresh):
        next_rows: list[Row] = []
        for row in rows:
            s = _bound(tp.subject, row)
            p = _bound(tp.predicate, row)
            o = _bound(tp.object, row)
            for quad in _match_active(ds, s, p, o, active):
                extended = _extend(row, tp, quad)
                if extended is not None:
                    next_rows.append(extended)
        rows = next_rows
        if not rows:
            break
    return rows


def _bound(position: Union[Term, Variable], row: Row):
    if isinstance(position, Variable):
        return row.get(position.name, ANY)
    return position


def _match_active(ds: Dataset, s, p, o, active: tuple[GraphName, ...]) -> list[Quad]:
    if len(active) == 1:
        return ds.match(s, p, o, active[0])
    # Multiple FROM graphs form a merged default graph: a triple set, so
    # identical triples from different graphs collapse.
    seen: dict[tuple, Quad] = {}
    for graph in active:
        for quad in ds.match(s, p, o, graph):
            seen.setdefault((quad.subject, quad.predicate, quad.object), quad)
    return sorted(seen.values(), key=lambda q: (term_key(q.subject), term_key(q.predicate), term_key(q.object)))


def _extend(row: Row, tp: TriplePattern, quad: Quad) -> Optional[Row]:
    out = dict(row)
    for position, value in (
        (tp.subject, quad.subject),
        (tp.predicate, quad.predicate),
        (tp.object, quad.object),
    ):
        if isinstance(position, Variable):
            existing = out.get(position.name)
            if existing is None:
                out[position.name] = value
            elif existing != value:
                return None
    return out


def _hash_join(
    left: list[Row],
    right: list[Row],
    shared: list[str],
    left_keys: tuple[Expression, ...] = (),
    right_keys: tuple[Expression, ...] = (),
) -> list[Row]:
    index: dict[tuple, list[Row]] = {}
    for row in right:
        key = _join_key(row, shared, right_keys)
        if key is not None:
            index.setdefault(key, []).append(row)
    out: list[Row] = []
    for row in left:
        key = _join_key(row, shared, left_keys)
        if key is None:
            continue
        for other in index.get(key, ()):
            merged = dict(row)
            merged.update(other)
            out.append(merged)
    return out


def _join_key(row: Row, shared: list[str], keys: tuple[Expression, ...]) -> Optional[tuple]:
    parts: list = [row.get(name) for name in shared]
    for expression in keys:
        try:
            parts.append(_eval_expression(expression, row))
        except _ExprError:
            # The equality this key came from can never be true here.
            return None
    return tuple(parts)


def _eval_filter(
    node: Filter,
    active: tuple[GraphName, ...],
    named: frozenset[Iri],
    ds: Dataset,
    fresh: "count[int]",
) -> list[Row]:
    inner = node.pattern
    if isinstance(inner, Join):
        conjuncts = _split_and(node.expression)
        left_scope = pattern_variables(inner.left)
        right_scope = pattern_variables(inner.right)
        left_keys: list[Expression] = []
        right_keys: list[Expression] = []
        rest: list[Expression] = []
        for conjunct in conjuncts:
            placed = False
            if isinstance(conjunct, Equals):
                a_vars = expression_variables(conjunct.left)
                b_vars = expression_variables(conjunct.right)
                if _is_keyable(conjunct.left) and _is_keyable(conjunct.right) and a_vars and b_vars:
                    if a_vars <= left_scope and b_vars <= right_scope:
                        left_keys.append(conjunct.left)
                        right_keys.append(conjunct.right)
                        placed = True
                    elif a_vars <= right_scope and b_vars <= left_scope:
                        left_keys.append(conjunct.right)
                        right_keys.append(conjunct.left)
                        placed = True
            if not placed:
                rest.append(conjunct)
        if left_keys:
            left = _eval_pattern(inner.left, active, named, ds, fresh)
            right = _eval_pattern(inner.right, active, named, ds, fresh)
            shared = sorted(left_scope & right_scope)
            joined = _hash_join(left, right, shared, tuple(left_keys), tuple(right_keys))
            return [row for row in joined if all(_truth(c, row) for c in rest)]

    rows = _eval_pattern(inner, active, named, ds, fresh)
    return [row for row in rows if _truth(node.expression, row)]


def _split_and(expression: Expression) -> list[Expression]:
    if isinstance(expression, And):
        return _split_and(expression.left) + _split_and(expression.right)
    return [expression]


def _is_keyable(expression: Expression) -> bool:
    """Expressions whose values hash consistently across rows (date parts)."""
    return isinstance(expression, DateFunc)


# -- expressions -------------------------------------------------------------


def _truth(expression: Expression, row: Row) -> bool:
    try:
        return _effective_boolean(_eval_expression(expression, row))
    except _ExprError:
        return False


def _eval_expression(expression: Expression, row: Row):
    if isinstance(expression, Variable):
        value = row.get(expression.name)
        if value is None:
            raise _ExprError("unbound variable")
        return value
    if isinstance(expression, Constant):
        return expression.value
    if isinstance(expression, DateFunc):
        value = _eval_expression(expression.argument, row)
        if not isinstance(value, Literal) or value.datatype != XSD_DATETIME:
            raise _ExprError(f"{expression.component}() needs an xsd:dateTime")
        try:
            instant = parse_datetime(value.lexical)
        except EnergyKgError:
            raise _ExprError("invalid dateTime lexical form")
        return getattr(instant, expression.component)
    if isinstance(expression, Equals):
        return _equals(
            _eval_expression(expression.left, row), _eval_expression(expression.right, row)
        )
    if isinstance(expression, And):
        left = _try_bool(expression.left, row)
        right = _try_bool(expression.right, row)
        # SPARQL logical-and: false wins over an error on the other side.
        if left is False or right is False:
            return False
        if left is None or right is None:
            raise _ExprError("error in && operand")
        return True
    raise _ExprError(f"unknown expression {expression!r}")


def _try_bool(expression: Expression, row: Row) -> Optional[bool]:
    try:
        return _effective_boolean(_eval_expression(expression, row))
    except _ExprError:
        return None


def _effective_boolean(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value != 0
    if isinstance(value, Literal):
        if value.datatype == XSD_BOOLEAN:
            return value.lexical == "true"
        if value.datatype in NUMERIC_DATATYPES:
            return _as_decimal(value) != 0
        if value.datatype == XSD_STRING:
            return value.lexical != ""
    raise _ExprError(f"no effective boolean value for {value!r}")


def _as_decimal(value) -> Decimal:
    if isinstance(value, bool):
        raise _ExprError("boolean is not numeric")
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, Literal) and value.datatype in NUMERIC_DATATYPES:
        try:
            return parse_numeric(value)
        except EnergyKgError:
            raise _ExprError("unparseable numeric literal")
    raise _ExprError("not numeric")


def _equals(a, b) -> bool:
    a_num = _maybe_decimal(a)
    b_num = _maybe_decimal(b)
    if a_num is not None and b_num is not None:
        return a_num == b_num
    if isinstance(a, Literal) and isinstance(b, Literal):
        if a.datatype == XSD_DATETIME and b.datatype == XSD_DATETIME:
            try:
                return parse_datetime(a.lexical) == parse_datetime(b.lexical)
            except EnergyKgError:
                raise _ExprError("invalid dateTime in comparison")
        if a.datatype == XSD_STRING and b.datatype == XSD_STRING:
            return a.lexical == b.lexical
        if a == b:
            return True
        raise _ExprError(f"cannot compare literals {a} and {b}")
    if isinstance(a, Iri) and isinstance(b, Iri):
        return a == b
    if isinstance(a, BlankNode) and isinstance(b, BlankNode):
        return a == b
    if isinstance(a, (Iri, BlankNode, Literal)) and isinstance(b, (Iri, BlankNode, Literal)):
        # Different term kinds are unequal, not an error.
        return False
    raise _ExprError(f"cannot compare {a!r} with {b!r}")


def _maybe_decimal(value) -> Optional[Decimal]:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, Literal) and value.datatype in NUMERIC_DATATYPES:
        try:
            return parse_numeric(value)
        except EnergyKgError:
            raise _ExprError("unparseable numeric literal")
    return None


# -- builtin date accessors (exposed for direct use and tests) ---------------


def builtin_year(literal: Literal) -> int:
    return _date_component(literal, "year")


def builtin_month(literal: Literal) -> int:
    return _date_component(literal, "month")


def builtin_day(literal: Literal) -> int:
    return _date_component(literal, "day")


def _date_component(literal: Literal, component: str) -> int:
    try:
        return _eval_expression(DateFunc(component, Constant(literal)), {})
    except _ExprError as exc:
        raise EvaluationError(str(exc))
