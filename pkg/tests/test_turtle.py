import string
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from energykg.dataset import Dataset
from energykg.namespaces import RDF_TYPE, SEAS
from energykg.terms import (
    Iri,
    Literal,
    PrefixMap,
    Quad,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
)
from energykg.turtle import TurtleParseError, load_turtle, parse_turtle, serialize_turtle

DATA = Path(__file__).parent / "data"

BASE = Iri("http://jresearch.ucd.ie/climate-kg/")
COSSMIC = Iri("http://jresearch.ucd.ie/climate-kg/resource/cossmic/")


def _triple_set(triples):
    return set(triples)


def test_parse_topology_fixture_triple_count():
    text = (DATA / "cossmic_topology.ttl").read_text()
    triples, prefixes = parse_turtle(text)
    # Hand count repeatedly confirms 10 statements in the transcription.
    assert len(triples) == 10
    assert prefixes.base == BASE
    assert prefixes.expand("seas", "x") == Iri("https://w3id.org/seas/x")


def test_topology_fixture_contents():
    text = (DATA / "cossmic_topology.ttl").read_text()
    triples, _ = parse_turtle(text)
    site = Iri(COSSMIC.value + "DE_KN_residential1")
    machine = Iri(COSSMIC.value + "DE_KN_residential1_washing_machine")
    assert (site, RDF_TYPE, SEAS.IndustrialBuilding) in _triple_set(triples)
    assert (machine, RDF_TYPE, SEAS.ElectricPowerConsumer) in _triple_set(triples)
    consumers = [t for t in triples if t[1] == RDF_TYPE and t[2] == SEAS.ElectricPowerConsumer]
    assert [t[0] for t in consumers] == [machine]


def test_match_over_topology_fixture():
    from energykg.dataset import ANY, Dataset

    ds = Dataset()
    load_turtle(ds, (DATA / "cossmic_topology.ttl").read_text())
    hits = ds.match(ANY, RDF_TYPE, SEAS.ElectricPowerConsumer, ANY)
    assert len(hits) == 1
    assert hits[0].subject.value.endswith("washing_machine")


def test_empty_graph_serializes_to_header_only():
    pm = PrefixMap(base=BASE)
    pm.bind("seas", Iri("https://w3id.org/seas/"))
    text = serialize_turtle(Dataset(), None, pm)
    assert text == (
        "@base <http://jresearch.ucd.ie/climate-kg/> .\n"
        "@prefix seas: <https://w3id.org/seas/> .\n"
    )


def test_datetime_literal_serializes_typed():
    ds = Dataset()
    ds.add(
        Quad(
            Iri("http://example.org/e"),
            Iri("http://example.org/at"),
            Literal("2016-05-01T00:00:00Z", XSD_DATETIME),
        )
    )
    pm = PrefixMap()
    pm.bind("xsd", Iri("http://www.w3.org/2001/XMLSchema#"))
    text = serialize_turtle(ds, None, pm)
    assert '"2016-05-01T00:00:00Z"^^xsd:dateTime' in text
    triples, _ = parse_turtle(text)
    assert triples[0][2] == Literal("2016-05-01T00:00:00Z", XSD_DATETIME)


def test_serialization_is_deterministic():
    ds = Dataset()
    for i in (3, 1, 2):
        ds.add(Quad(Iri(f"http://example.org/s{i}"), RDF_TYPE, SEAS.ElectricPowerSystem))
    pm = PrefixMap()
    assert serialize_turtle(ds, None, pm) == serialize_turtle(ds, None, pm)


def test_missing_object_is_a_syntax_error():
    with pytest.raises(TurtleParseError):
        parse_turtle("@prefix x: <http://example.org/> .\nx:y x:z")


def test_error_reports_line_and_column():
    with pytest.raises(TurtleParseError) as excinfo:
        parse_turtle('@prefix p: <http://example.org/> .\np:a p:b "unterminated')
    assert excinfo.value.line == 2


def test_undefined_prefix_named_in_error():
    with pytest.raises(TurtleParseError) as excinfo:
        parse_turtle("nope:a nope:b nope:c .")
    assert "nope" in str(excinfo.value)


def test_comments_and_boolean_and_numbers():
    text = (
        "@prefix p: <http://example.org/> .\n"
        "# a comment line\n"
        "p:s p:int 42 ; p:dec 4.5 ; p:flag true . # trailing comment\n"
    )
    triples, _ = parse_turtle(text)
    objects = {t[2] for t in triples}
    assert Literal("42", XSD_INTEGER) in objects
    assert Literal("4.5", XSD_DECIMAL) in objects


def test_blank_node_labels_scoped_per_document():
    text = "@prefix p: <http://example.org/> .\n_:x p:q _:x .\n"
    first, _ = parse_turtle(text)
    second, _ = parse_turtle(text)
    assert first[0][0] == first[0][2]
    assert first[0][0] == second[0][0]  # deterministic relabelling


def test_base_resolution_of_relative_iris():
    text = "@base <http://example.org/dir/> .\n<a> <b> <../c> .\n"
    triples, _ = parse_turtle(text)
    assert triples[0][0] == Iri("http://example.org/dir/a")
    assert triples[0][2] == Iri("http://example.org/c")


def test_load_turtle_places_triples_in_chosen_graph():
    ds = Dataset()
    graph = Iri("http://example.org/g")
    load_turtle(ds, "<http://example.org/s> <http://example.org/p> 1 .", graph=graph)
    assert len(ds.match(graph=graph)) == 1
    assert ds.match(graph=None) == []


# -- round-trip property -------------------------------------------------------

_iri_suffix = st.text(
    alphabet=string.ascii_letters + string.digits + "/_-.~%#",
    min_size=1,
    max_size=12,
)
_iris = st.builds(lambda s: Iri("http://example.org/" + s.strip("#") if s else "http://example.org/x"), _iri_suffix)

_lexicals = st.text(max_size=20)
_datatypes = st.sampled_from([XSD_STRING, XSD_INTEGER, XSD_DECIMAL, XSD_DATETIME])
_literals = st.builds(Literal, _lexicals, _datatypes)

_terms = st.one_of(_iris, _literals)
_quads = st.builds(lambda s, p, o: Quad(s, p, o, None), _iris, _iris, _terms)


@settings(max_examples=120, deadline=None)
@given(st.lists(_quads, max_size=30))
def test_round_trip_identity_for_blank_node_free_graphs(quads):
    ds = Dataset(quads)
    pm = PrefixMap()
    pm.bind("ex", Iri("http://example.org/"))
    pm.bind("xsd", Iri("http://www.w3.org/2001/XMLSchema#"))
    text = serialize_turtle(ds, None, pm)
    triples, _ = parse_turtle(text)
    assert {(q.subject, q.predicate, q.object) for q in quads} == set(triples)
    assert len(triples) == len(set(triples)) == len(ds)
