import pytest
from hypothesis import given
from hypothesis import strategies as st
from rapidfuzz.distance import Levenshtein as RFLevenshtein

from speechlink.strings import form_key, levenshtein, normalize, similarity, soundex


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("Berlin", "berlin"),
        ("Michael Müller", "michael müller"),
        ("  The-Capital ", "the capital"),
        ("i'd like to share", "i d like to share"),
        ("Mu\u0308ller", "m\u00fcller"),  # decomposed umlaut is composed
        ("", ""),
    ],
)
def test_normalize(raw, expected):
    assert normalize(raw) == expected


@given(st.text())
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


@pytest.mark.parametrize(
    "word, code",
    [
        ("berlin", "B645"),
        ("barline", "B645"),
        ("barley", "B640"),
        # textbook Soundex values
        ("robert", "R163"),
        ("rupert", "R163"),
        ("ashcraft", "A261"),
        ("tymczak", "T522"),
        ("pfister", "P236"),
        ("honeyman", "H555"),
    ],
)
def test_soundex(word, code):
    assert soundex(word) == code


def test_soundex_deterministic():
    assert soundex("germany") == soundex("germany") == soundex("Germany")


@pytest.mark.parametrize("bad", ["", "   ", "two words"])
def test_soundex_rejects_non_tokens(bad):
    with pytest.raises(ValueError):
        soundex(bad)


def test_form_key_per_token():
    assert form_key("michael müller") == f"{soundex('michael')} {soundex('müller')}"


@pytest.mark.parametrize(
    "a, b, d",
    [("barline", "berlin", 2), ("barley", "berlin", 3), ("kepital", "capital", 2), ("", "abc", 3), ("same", "same", 0)],
)
def test_levenshtein_hand_values(a, b, d):
    assert levenshtein(a, b) == d


@given(st.text(alphabet="abcd", max_size=12), st.text(alphabet="abcd", max_size=12))
def test_levenshtein_matches_reference(a, b):
    assert levenshtein(a, b) == RFLevenshtein.distance(a, b)


@given(
    st.text(alphabet="abc", max_size=10),
    st.text(alphabet="abc", max_size=10),
    st.integers(min_value=0, max_value=4),
)
def test_levenshtein_cutoff(a, b, k):
    full = levenshtein(a, b)
    capped = levenshtein(a, b, k)
    assert capped == full if full <= k else capped == k + 1


@given(st.lists(st.sampled_from(["w", "x", "y"]), max_size=8), st.lists(st.sampled_from(["w", "x", "y"]), max_size=8))
def test_levenshtein_on_token_lists(a, b):
    assert levenshtein(a, b) == RFLevenshtein.distance(a, b)


@given(st.text(max_size=15), st.text(max_size=15))
def test_similarity_bounds(a, b):
    s = similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert (s == 1.0) == (a == b)


def test_similarity_demo_pair():
    assert similarity("barline", "berlin") == pytest.approx(1 - 2 / 7)
