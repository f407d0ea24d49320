"""RDF term model: IRIs, literals, blank nodes, quads and prefix maps.

Terms are immutable and hashable. A quad's graph is either an ``Iri``
(named graph) or ``None`` (the default graph). Term identity is exact
string identity; no normalization is applied beyond RFC 3986 reference
resolution, so identifiers such as ``GHCND:GME00102404`` survive inside
path segments untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from functools import lru_cache
from typing import Optional, Union
from urllib.parse import urljoin, urlsplit

from .errors import EnergyKgError

_XSD = "http://www.w3.org/2001/XMLSchema#"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
# Characters RFC 3987 / Turtle forbid in an IRIREF body.
_BAD_IRI_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\]')


class IriError(EnergyKgError):
    """Malformed IRI or IRI reference."""


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME_RE.match(self.value):
            raise IriError(f"IRI is not absolute (missing scheme): {self.value!r}")
        bad = _BAD_IRI_CHARS.search(self.value)
        if bad:
            raise IriError(
                f"IRI contains forbidden character {bad.group()!r} "
                f"at offset {bad.start()}: {self.value!r}"
            )

    def __str__(self) -> str:
        return self.value


XSD_STRING = Iri(_XSD + "string")
XSD_INTEGER = Iri(_XSD + "integer")
XSD_DECIMAL = Iri(_XSD + "decimal")
XSD_DOUBLE = Iri(_XSD + "double")
XSD_BOOLEAN = Iri(_XSD + "boolean")
XSD_DATETIME = Iri(_XSD + "dateTime")

NUMERIC_DATATYPES = frozenset({XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE})


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: Iri = XSD_STRING

    def __str__(self) -> str:
        return f'"{self.lexical}"^^<{self.datatype.value}>'


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


Term = Union[Iri, Literal, BlankNode]
GraphName = Optional[Iri]


@dataclass(frozen=True, slots=True)
class Quad:
    subject: Union[Iri, BlankNode]
    predicate: Iri
    object: Term
    graph: GraphName = None


def resolve_iri(base: Iri, reference: str) -> Iri:
    """Resolve ``reference`` against ``base`` per RFC 3986.

    An absolute reference wins unchanged; anything containing characters
    illegal in an IRI raises with the offending offset.
    """
    bad = _BAD_IRI_CHARS.search(reference)
    if bad:
        raise IriError(
            f"IRI reference contains forbidden character {bad.group()!r} "
            f"at offset {bad.start()}: {reference!r}"
        )
    if _SCHEME_RE.match(reference):
        return Iri(reference)
    scheme = urlsplit(base.value).scheme
    if scheme in ("http", "https", "ftp", "file", ""):
        return Iri(urljoin(base.value, reference))
    # urljoin refuses relative resolution for unregistered schemes; fall
    # back to naive merge against the base's last slash.
    if reference.startswith("//"):
        return Iri(scheme + ":" + reference)
    head, _, _ = base.value.rpartition("/")
    return Iri(head + "/" + reference if head else base.value + reference)


# -- literal helpers ---------------------------------------------------------


def datetime_literal(instant: datetime) -> Literal:
    """Encode a UTC instant as an xsd:dateTime literal with Z designator."""
    if instant.tzinfo is None:
        raise IriError(f"naive datetime not allowed: {instant!r}")
    instant = instant.astimezone(timezone.utc)
    return Literal(instant.strftime("%Y-%m-%dT%H:%M:%SZ"), XSD_DATETIME)


@lru_cache(maxsize=65536)
def parse_datetime(lexical: str) -> datetime:
    """Parse an ISO-8601 instant with an explicit UTC designator or offset."""
    text = lexical
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise IriError(f"invalid xsd:dateTime lexical form: {lexical!r}") from exc
    if parsed.tzinfo is None:
        raise IriError(f"xsd:dateTime without timezone designator: {lexical!r}")
    return parsed.astimezone(timezone.utc)


def decimal_literal(value: Decimal) -> Literal:
    return Literal(format(value, "f"), XSD_DECIMAL)


def parse_numeric(literal: Literal) -> Decimal:
    if literal.datatype not in NUMERIC_DATATYPES:
        raise IriError(f"not a numeric literal: {literal}")
    try:
        return Decimal(literal.lexical)
    except InvalidOperation as exc:
        raise IriError(f"unparseable numeric lexical form: {literal.lexical!r}") from exc


# -- canonical encodings -----------------------------------------------------


def term_key(term: Term) -> str:
    """Canonical, total encoding used for deterministic ordering."""
    if isinstance(term, Literal):
        return f'"{term.lexical}"^^<{term.datatype.value}>'
    if isinstance(term, Iri):
        return f"<{term.value}>"
    return f"_:{term.label}"


def quad_key(quad: Quad) -> tuple[str, str, str, str]:
    graph = "" if quad.graph is None else quad.graph.value
    return (graph, term_key(quad.subject), term_key(quad.predicate), term_key(quad.object))


# -- prefix maps -------------------------------------------------------------


class PrefixError(EnergyKgError):
    """Duplicate or undefined prefix label."""


@dataclass
class PrefixMap:
    """Ordered prefix-label to namespace mapping with an optional base."""

    base: Optional[Iri] = None
    _namespaces: dict[str, Iri] = field(default_factory=dict)

    def bind(self, label: str, namespace: Iri) -> None:
        if label in self._namespaces and self._namespaces[label] != namespace:
            raise PrefixError(f"prefix {label!r} already bound to {self._namespaces[label]}")
        self._namespaces[label] = namespace

    def expand(self, label: str, local: str) -> Iri:
        if label not in self._namespaces:
            raise PrefixError(f"undefined prefix: {label!r}")
        return Iri(self._namespaces[label].value + local)

    def namespaces(self) -> dict[str, Iri]:
        return dict(self._namespaces)

    def __contains__(self, label: str) -> bool:
        return label in self._namespaces

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrefixMap):
            return NotImplemented
        return self.base == other.base and self._namespaces == other._namespaces
