"""Linked energy-climate knowledge graph toolkit.

CSV energy and climate data in, an indexed RDF quad store with a query
subset and HTTP endpoint in the middle, correlation reports out.
"""

from .dataset import ANY, Dataset
from .terms import BlankNode, Iri, Literal, PrefixMap, Quad, resolve_iri

__all__ = [
    "ANY",
    "Dataset",
    "BlankNode",
    "Iri",
    "Literal",
    "PrefixMap",
    "Quad",
    "resolve_iri",
]
