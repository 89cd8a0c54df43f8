from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BERLIN, CAPITAL, COUNTRY, DBO, GERMANY, MUELLER
from speechlink.kg import (
    IRI,
    RDFS_LABEL,
    KnowledgeGraph,
    Literal,
    NTriplesParseError,
    Term,
    Triple,
    load_graph,
    local_name,
    parse_ntriples,
    serialize_ntriples,
)


def test_parse_demo_statement():
    doc = "<http://dbpedia.org/resource/Berlin> <http://dbpedia.org/ontology/country> <http://dbpedia.org/resource/Germany> ."
    assert parse_ntriples(doc) == [Triple(IRI(BERLIN), IRI(COUNTRY), IRI(GERMANY))]


def test_parse_literal_object():
    doc = '<http://dbpedia.org/resource/Berlin> <http://dbpedia.org/ontology/areaCode> "030" .'
    (t,) = parse_ntriples(doc)
    assert t.object == Literal("030")
    assert t.object.is_literal


def test_parse_empty_document():
    assert parse_ntriples("") == []
    assert parse_ntriples("\n# just a comment\n\n") == []


def test_parse_escapes_lang_and_datatype():
    doc = (
        '<http://x/s> <http://x/p> "a \\"quoted\\" \\\\ line\\nnext\\ttab" .\n'
        '<http://x/s> <http://x/p> "Berlin"@de .\n'
        '<http://x/s> <http://x/p> "030"^^<http://www.w3.org/2001/XMLSchema#string> .\n'
        '<http://x/s> <http://x/p> "caf\\u00E9" . # trailing comment\n'
    )
    a, b, c, d = parse_ntriples(doc)
    assert a.object.value == 'a "quoted" \\ line\nnext\ttab'
    assert b.object == Literal("Berlin", lang="de")
    assert c.object == Literal("030", datatype="http://www.w3.org/2001/XMLSchema#string")
    assert d.object.value == "café"


@pytest.mark.parametrize(
    "line",
    [
        "<http://x/s> <http://x/p> <http://x/o>",  # no terminating dot
        '"lit" <http://x/p> <http://x/o> .',  # literal subject
        "<http://x/s> <http://x/p> _:b0 .",  # blank node
        "_:b0 <http://x/p> <http://x/o> .",
        "<http://x/s> <http://x/p> \"unterminated .",
        "<http://x/s with space> <http://x/p> <http://x/o> .",
    ],
)
def test_parse_errors_carry_line_number(line):
    doc = "# header\n<http://x/a> <http://x/b> <http://x/c> .\n" + line + "\n"
    with pytest.raises(NTriplesParseError) as info:
        parse_ntriples(doc)
    assert info.value.lineno == 3
    assert info.value.line == line
    assert "line 3" in str(info.value)


def test_term_invariants():
    with pytest.raises(ValueError):
        Term("iri", "http://x", lang="en")
    with pytest.raises(ValueError):
        Literal("x", lang="en", datatype="http://x")
    with pytest.raises(ValueError):
        Triple(Literal("s"), IRI("http://p"), IRI("http://o"))


# --- the fixture graph ----------------------------------------------------------


def test_fixture_loads_seven_triples(fixture_triples, graph):
    assert len(fixture_triples) == 7
    assert len(graph) == 7


def test_load_deduplicates(fixture_triples):
    assert len(load_graph(fixture_triples + [fixture_triples[0]])) == 7


def test_empty_graph():
    g = load_graph([])
    assert len(g) == 0
    assert g.triples_matching() == []
    assert g.triples_matching(s=BERLIN) == []
    assert g.support(BERLIN) == 0
    assert g.entity_description(BERLIN) == []


def test_triples_matching(graph, fixture_triples):
    assert len(graph.triples_matching(s=BERLIN)) == 5
    assert graph.triples_matching() == fixture_triples
    assert graph.triples_matching(BERLIN, CAPITAL, IRI(GERMANY)) == [
        Triple(IRI(BERLIN), IRI(CAPITAL), IRI(GERMANY))
    ]
    # bare IRI strings are accepted in object position
    assert graph.triples_matching(o=GERMANY) == graph.triples_matching(o=IRI(GERMANY))
    assert graph.triples_matching(o=Literal("030")) == [fixture_triples[2]]


def test_connecting_triples(graph):
    found = graph.connecting_triples(BERLIN, GERMANY)
    assert [t.predicate.value for t in found] == [COUNTRY, CAPITAL]
    assert graph.connecting_triples(GERMANY, MUELLER) == []
    with pytest.raises(ValueError):
        graph.connecting_triples(BERLIN, BERLIN)


def test_support(graph):
    assert graph.support(BERLIN) == 5
    assert graph.support(GERMANY) == 3
    assert graph.support("http://example.org/nothing") == 0
    # predicates are not counted
    assert graph.support(CAPITAL) == 0


def test_entity_description(graph):
    assert len(graph.entity_description(BERLIN)) == 5
    assert graph.entity_description(MUELLER) == [
        Triple(IRI(MUELLER), IRI(RDFS_LABEL), Literal("Michael Müller"))
    ]
    assert graph.entity_description("http://example.org/nothing") == []


def test_graph_is_read_only(graph):
    with pytest.raises(AttributeError):
        graph.extra = 1
    with pytest.raises(TypeError):
        graph.support_counts[BERLIN] = 0


@pytest.mark.parametrize(
    "iri, name",
    [
        (BERLIN, "Berlin"),
        (MUELLER, "Michael Müller"),
        (RDFS_LABEL, "label"),
        (DBO + "areaCode", "areaCode"),
        ("http://dbpedia.org/resource/K%C3%B6ln", "Köln"),
        ("urn:isbn:123", "123"),
    ],
)
def test_local_name(iri, name):
    assert local_name(iri) == name


# --- properties --------------------------------------------------------------------

_iri_chars = st.sampled_from("abcxyzABC019_-.~%/#:ü€")
iris = st.builds(lambda tail: "http://example.org/" + tail, st.text(_iri_chars, min_size=1, max_size=8))
literals = st.one_of(
    st.builds(Literal, st.text(max_size=12)),
    st.builds(lambda v, l: Literal(v, lang=l), st.text(max_size=6), st.sampled_from(["en", "de", "en-GB"])),
    st.builds(lambda v, d: Literal(v, datatype=d), st.text(max_size=6), iris),
)
triples = st.builds(
    lambda s, p, o: Triple(IRI(s), IRI(p), o), iris, iris, st.one_of(iris.map(IRI), literals)
)
small_graphs = st.lists(
    st.builds(
        lambda s, p, o: Triple(IRI(s), IRI(p), o),
        st.sampled_from(["http://g/a", "http://g/b", "http://g/c"]),
        st.sampled_from(["http://g/p", "http://g/q"]),
        st.one_of(st.sampled_from(["http://g/a", "http://g/b", "http://g/c"]).map(IRI), st.builds(Literal, st.sampled_from(["x", "y"]))),
    ),
    max_size=25,
)


@settings(max_examples=100)
@given(st.lists(triples, max_size=10))
def test_round_trip(ts):
    doc = serialize_ntriples(ts)
    assert Counter(parse_ntriples(doc)) == Counter(ts)


@given(small_graphs)
def test_index_consistency(ts):
    g = load_graph(ts)
    for t in g:
        assert t in g.triples_matching(s=t.subject.value)
        assert t in g.triples_matching(p=t.predicate.value)
        assert t in g.triples_matching(o=t.object)
        assert g.triples_matching(t.subject.value, t.predicate.value, t.object) == [t]


@given(small_graphs)
def test_matching_agrees_with_scan(ts):
    g = load_graph(ts)
    for s in (None, "http://g/a"):
        for p in (None, "http://g/q"):
            for o in (None, IRI("http://g/b"), Literal("x")):
                expected = [
                    t
                    for t in g.triples
                    if (s is None or t.subject.value == s)
                    and (p is None or t.predicate.value == p)
                    and (o is None or t.object == o)
                ]
                assert g.triples_matching(s, p, o) == expected


@given(small_graphs)
def test_connecting_symmetric(ts):
    g = load_graph(ts)
    nodes = ["http://g/a", "http://g/b", "http://g/c"]
    for a in nodes:
        for b in nodes:
            if a != b:
                assert set(g.connecting_triples(a, b)) == set(g.connecting_triples(b, a))


@given(small_graphs)
def test_support_sum(ts):
    g = load_graph(ts)
    iri_objects = sum(t.object.is_iri for t in g)
    literal_objects = len(g) - iri_objects
    assert sum(g.support_counts.values()) == 2 * iri_objects + literal_objects
    assert sum(g.support(e) for e in g.entities) == 2 * iri_objects + literal_objects


def test_knowledge_graph_constructor_matches_load(fixture_triples):
    assert KnowledgeGraph(fixture_triples).triples == load_graph(fixture_triples).triples
