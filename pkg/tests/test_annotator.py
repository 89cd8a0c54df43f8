import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from rapidfuzz.distance import Levenshtein as RFLevenshtein

from conftest import BERLIN, CAPITAL, GERMANY, MUELLER
from speechlink.annotator import (
    EPSILON,
    Annotator,
    Mention,
    Weights,
    annotate,
    context_model,
    contextual_score,
    default_stopwords,
    disambiguate,
    load_stopwords,
    spot,
    tokenize,
)
from speechlink.kg import IRI, RDFS_LABEL, Literal, Triple, load_graph
from speechlink.surface import build_index


def test_tokenize():
    assert tokenize("Berlin is the capital of Germany") == ["berlin", "is", "the", "capital", "of", "germany"]
    assert tokenize("") == []
    assert tokenize("i'd like to share") == ["i", "d", "like", "to", "share"]


def test_default_stopwords():
    stop = default_stopwords()
    assert len(stop) == 50
    assert {"the", "of", "is"} <= stop
    assert "capital" not in stop


def test_load_stopwords(tmp_path):
    f = tmp_path / "stop.txt"
    f.write_text("# comment\nThe\n\nof\n", encoding="utf-8")
    assert load_stopwords(f) == {"the", "of"}


def test_spot_demo(index):
    got = spot(tokenize("Berlin is the capital of Germany"), index)
    assert [(m.surface, m.start, m.end) for m in got] == [("berlin", 0, 1), ("capital", 3, 4), ("germany", 5, 6)]


def test_spot_stopwords_only(index):
    assert spot(["the", "of", "is"], index) == []


def test_spot_multiword(index):
    assert spot(tokenize("michael müller spoke"), index) == [Mention(0, 2, "michael müller")]


def test_spot_stopword_label_is_skipped():
    g = load_graph([Triple(IRI("http://x/The"), IRI(RDFS_LABEL), Literal("the"))])
    assert spot(["the", "thing"], build_index(g)) == []


def test_spot_longest_match_wins():
    g = load_graph(
        [
            Triple(IRI("http://x/New_York"), IRI(RDFS_LABEL), Literal("New York")),
            Triple(IRI("http://x/York"), IRI(RDFS_LABEL), Literal("York")),
        ]
    )
    assert spot(tokenize("new york and york"), build_index(g)) == [Mention(0, 2, "new york"), Mention(3, 4, "york")]


def test_spot_respects_max_form_tokens():
    g = load_graph([Triple(IRI("http://x/e"), IRI(RDFS_LABEL), Literal("one two three four"))])
    toks = tokenize("one two three four")
    assert spot(toks, build_index(g)) == []
    assert spot(toks, build_index(g, max_form_tokens=4)) == [Mention(0, 4, "one two three four")]


def test_context_model_berlin(graph):
    bag = context_model(graph, BERLIN)
    assert {"berlin", "germany", "michael", "müller", "030", "country", "leader", "capital", "areacode"} <= set(bag)
    assert bag["germany"] == 2  # neighbour through country and capital


def test_context_model_isolated_and_unknown():
    g = load_graph([Triple(IRI("http://x/X"), IRI(RDFS_LABEL), Literal("X"))])
    assert context_model(g, "http://x/X") == Counter({"x": 1, "label": 1})
    assert context_model(g, "http://x/unknown") == Counter()


def test_contextual_score_basics():
    bag = Counter({"a": 2, "b": 1})
    assert contextual_score(bag, bag) == pytest.approx(1.0)
    assert contextual_score(bag, Counter({"c": 1})) == 0.0
    assert contextual_score(Counter(), bag) == 0.0


# Context bags of the three fixture entities, enumerated by hand from the
# seven fixture triples (neighbour labels + predicate names + own literals).
HAND_MODELS = {
    BERLIN: "country germany leader michael müller areacode 030 label berlin capital germany",
    GERMANY: "label germany country berlin capital berlin",
    MUELLER: "label michael müller leader berlin",
}


def _hand_tfidf_cosine(sentence_tokens, entity):
    docs = {e: Counter(text.split()) for e, text in HAND_MODELS.items()}
    n = len(docs)
    vocab = set().union(*docs.values())
    idf = {t: math.log((1 + n) / (1 + sum(t in d for d in docs.values()))) + 1 for t in vocab}
    s = {t: c * idf[t] for t, c in Counter(sentence_tokens).items() if t in idf}
    e = {t: c * idf[t] for t, c in docs[entity].items()}
    dot = sum(s[t] * e.get(t, 0) for t in s)
    return dot / math.sqrt(sum(v * v for v in s.values()) * sum(v * v for v in e.values()))


def test_hand_models_match(graph):
    for e, text in HAND_MODELS.items():
        assert context_model(graph, e) == Counter(text.split())


def test_contextual_score_fixture_oracle(annotator):
    ann = annotator.annotate("Berlin is the capital of Germany")
    berlin_link = ann.links[0][1]
    expected = _hand_tfidf_cosine(["is", "the", "capital", "of", "germany"], BERLIN)
    assert 0 < expected <= 1
    assert expected == pytest.approx(0.5738750425, abs=1e-9)
    assert berlin_link.contextual_score == pytest.approx(expected, abs=1e-12)
    assert berlin_link.topic_pertinence == berlin_link.contextual_score


def test_disambiguate_single_candidate(graph, index):
    link = disambiguate(Mention(0, 1, "berlin"), [BERLIN], Counter(), graph, index)
    assert link.entity == BERLIN
    assert link.percentage_of_second_rank == 0.0
    assert link.contextual_ambiguity == 1.0
    assert link.prior == pytest.approx(5 / 10)
    assert link.support == 5


def test_disambiguate_fuzzy_barline(graph, index):
    link = disambiguate(Mention(0, 1, "barline"), [BERLIN], Counter(["capital", "germany"]), graph, index)
    assert link.entity == BERLIN
    assert link.likelihood == pytest.approx(1 - 2 / 7)


def test_disambiguate_empty_candidates(graph, index):
    with pytest.raises(ValueError):
        disambiguate(Mention(0, 1, "x"), [], Counter(), graph, index)


def test_disambiguate_tie_goes_to_smaller_iri():
    a, b = "http://x/ParisA", "http://x/ParisB"
    g = load_graph([Triple(IRI(e), IRI(RDFS_LABEL), Literal("Paris")) for e in (b, a)])
    link = disambiguate(Mention(0, 1, "paris"), [b, a], Counter(), g, build_index(g))
    assert link.entity == a
    assert link.percentage_of_second_rank == pytest.approx(1.0)
    assert link.contextual_ambiguity == pytest.approx(0.0)


def test_annotate_demo(graph, index):
    ann = annotate("Berlin is the capital of Germany", graph, index)
    assert ann.entities == [BERLIN, CAPITAL, GERMANY]
    assert annotate("", graph, index).links == []
    assert annotate("qwghlm flurble", graph, index).links == []


def test_fuzzy_tier_off_by_default(graph, index):
    assert annotate("Barline is the capital of Germany", graph, index).entities == [CAPITAL, GERMANY]
    fuzzy = Annotator(graph, index, fuzzy=True, fuzzy_max_dist=2)
    ann = fuzzy.annotate("Barline is the capital of Germany")
    assert ann.entities == [BERLIN, CAPITAL, GERMANY]
    assert ann.links[0][1].likelihood == pytest.approx(1 - 2 / 7)


def test_record_fields(annotator):
    rec = annotator.annotate("Michael Müller").to_record("u1")
    assert rec["id"] == "u1"
    (link,) = rec["links"]
    assert link["entity"] == MUELLER
    assert (link["start"], link["end"]) == (0, 2)


def test_weights_validation():
    with pytest.raises(ValueError):
        Weights(-1, 1, 1)


# --- properties over small ambiguous graphs ----------------------------------------

LABELS = ["alpha", "beta", "gamma", "delta"]


@st.composite
def ambiguous_graphs(draw):
    n = draw(st.integers(2, 7))
    ents = [f"http://x/e{k}" for k in range(n)]
    triples = [Triple(IRI(e), IRI(RDFS_LABEL), Literal(draw(st.sampled_from(LABELS)))) for e in ents]
    preds = ["http://x/p/near", "http://x/p/part"]
    for _ in range(draw(st.integers(0, 10))):
        s, o = draw(st.sampled_from(ents)), draw(st.sampled_from(ents))
        triples.append(Triple(IRI(s), IRI(draw(st.sampled_from(preds))), IRI(o)))
    sentence = " ".join(draw(st.lists(st.sampled_from(LABELS + ["near", "part", "the", "zz"]), max_size=6)))
    return load_graph(triples), sentence


def _brute_force_winner(graph, index, mention, candidates, context, weights):
    """Score every candidate from first principles and take the best."""
    total = sum(1 + t.object.is_iri for t in graph)
    ann = Annotator(graph, index, weights)
    rows = []
    for e in candidates:
        support = sum((t.subject.value == e) + (t.object.is_iri and t.object.value == e) for t in graph)
        prior = support / total
        lik = max(
            1 - RFLevenshtein.distance(mention.surface, f) / max(len(mention.surface), len(f))
            for f in index.forms_for(e)
        )
        ctx = contextual_score(context, ann.context_model(e), ann.idf)
        score = (
            (prior + EPSILON) ** weights.prior
            * (lik + EPSILON) ** weights.likelihood
            * (ctx + EPSILON) ** weights.context
        )
        rows.append((score, e))
    best = max(s for s, _ in rows)
    return min(e for s, e in rows if math.isclose(s, best, rel_tol=1e-12)), rows


@settings(max_examples=80, deadline=None)
@given(ambiguous_graphs())
def test_priors_sum_to_one(data):
    g, _ = data
    ann = Annotator(g, build_index(g))
    assert math.fsum(ann.prior(e) for e in g.entities) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(ambiguous_graphs(), st.floats(0.1, 10))
def test_link_invariants(data, scale):
    g, sentence = data
    idx = build_index(g)
    ann = Annotator(g, idx)
    scaled = Annotator(g, idx, Weights().scaled(scale))
    result = ann.annotate(sentence)
    assert ann.annotate(sentence) == result  # deterministic
    for m, link in result.links:
        for name in (
            "prior",
            "likelihood",
            "contextual_score",
            "topic_pertinence",
            "percentage_of_second_rank",
            "contextual_ambiguity",
            "final_score",
        ):
            assert 0.0 <= getattr(link, name) <= 1.0, name
        assert link.support >= 0
        cands = ann.candidates(m)
        ctx = Counter(result.tokens[: m.start] + result.tokens[m.end :])
        ranked = ann.score_candidates(m, cands, ctx)
        if len(cands) >= 2:
            assert link.percentage_of_second_rank + link.contextual_ambiguity == pytest.approx(1.0)
            tie = ranked[0].log_score == ranked[1].log_score
            assert (link.percentage_of_second_rank == 1.0) == tie
        else:
            assert (link.percentage_of_second_rank, link.contextual_ambiguity) == (0.0, 1.0)
        # argmax and full ranking survive positive rescaling of the weights
        assert [c.entity for c in scaled.score_candidates(m, cands, ctx)] == [c.entity for c in ranked]
        # exhaustive oracle
        winner, _ = _brute_force_winner(g, idx, m, cands, ctx, Weights())
        assert link.entity == winner
