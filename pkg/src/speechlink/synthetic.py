"""Seeded synthetic knowledge graph and transcript corpus.

The corpus imitates the situation behind out-of-vocabulary errors: reference
sentences state graph facts ("<a> is the <relation> of <b>") and also contain
rare words that sound like entity names but are unknown to the recognizer.
The recognizer vocabulary therefore contains entity names but not those rare
words, so the channel turns them into entity names when it substitutes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kg import RDFS_LABEL, IRI, KnowledgeGraph, Literal, Triple, load_graph
from .simulator import SplitMix64
from .strings import soundex

__all__ = ["SyntheticConfig", "SyntheticCorpus", "make_corpus"]

RES = "http://example.org/resource/"
ONT = "http://example.org/ontology/"

RELATIONS = ("capital", "leader", "partner", "neighbour", "founder", "member")
FILLERS = (
    "people", "today", "said", "new", "market", "year", "city", "report", "week",
    "government", "music", "company", "river", "many", "small", "large", "first",
    "last", "good", "known", "place", "around", "story", "great", "public", "open",
    "local", "world", "season", "history", "village", "morning", "station", "team",
    "school", "night", "winter", "summer", "again", "later",
)
CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aeiou"


@dataclass(frozen=True)
class SyntheticConfig:
    n_entities: int = 50
    n_sentences: int = 200
    edges_per_entity: int = 2
    # fraction of sentences built around one graph fact; the rest are chatter
    fact_fraction: float = 0.6
    oov_per_sentence: tuple[int, int] = (1, 2)
    fillers_per_sentence: tuple[int, int] = (2, 5)
    seed: int = 20170801


@dataclass
class SyntheticCorpus:
    graph: KnowledgeGraph
    sentences: list[str]
    vocabulary: frozenset[str]
    oov_words: frozenset[str]
    entity_names: dict[str, str] = field(default_factory=dict)

    def transcripts(self) -> list[tuple[str, str]]:
        return [(f"s{k:04d}", s) for k, s in enumerate(self.sentences)]


def _pseudo_word(rng: SplitMix64, syllables: int) -> str:
    return "".join(CONSONANTS[rng.below(len(CONSONANTS))] + VOWELS[rng.below(len(VOWELS))] for _ in range(syllables))


def _sound_alike(rng: SplitMix64, word: str, taken: set[str]) -> str | None:
    """Same Soundex code, different spelling: reshuffle the vowels."""
    for _ in range(50):
        chars = [VOWELS[rng.below(len(VOWELS))] if ch in VOWELS and k > 0 else ch for k, ch in enumerate(word)]
        cand = "".join(chars)
        if rng.random() < 0.5:
            cand += VOWELS[rng.below(len(VOWELS))]
        if cand != word and cand not in taken and soundex(cand) == soundex(word):
            return cand
    return None


def _between(rng: SplitMix64, bounds: tuple[int, int]) -> int:
    lo, hi = bounds
    return lo + rng.below(hi - lo + 1)


def make_corpus(config: SyntheticConfig = SyntheticConfig()) -> SyntheticCorpus:
    rng = SplitMix64(config.seed)
    reserved = set(FILLERS) | set(RELATIONS) | {"is", "the", "of", "label"}

    names: list[str] = []
    while len(names) < config.n_entities:
        w = _pseudo_word(rng, 2 + rng.below(2))
        if w not in reserved and w not in names:
            names.append(w)
    taken = reserved | set(names)
    oov: dict[str, str] = {}
    for w in names:
        alike = _sound_alike(rng, w, taken)
        if alike is not None:
            oov[w] = alike
            taken.add(alike)

    iri = {w: RES + w.capitalize() for w in names}
    triples = [Triple(IRI(iri[w]), IRI(RDFS_LABEL), Literal(w.capitalize())) for w in names]
    facts = []
    for k, w in enumerate(names):
        triples.append(Triple(IRI(iri[w]), IRI(ONT + "code"), Literal(f"{100 + k}")))
        for _ in range(config.edges_per_entity):
            other = names[rng.below(len(names))]
            if other == w:
                continue
            rel = RELATIONS[rng.below(len(RELATIONS))]
            triples.append(Triple(IRI(iri[w]), IRI(ONT + rel), IRI(iri[other])))
            facts.append((w, rel, other))
    graph = load_graph(triples)

    oov_list = [oov[w] for w in names if w in oov]
    sentences = []
    for _ in range(config.n_sentences):
        words = [FILLERS[rng.below(len(FILLERS))] for _ in range(_between(rng, config.fillers_per_sentence))]
        for _ in range(_between(rng, config.oov_per_sentence)):
            words.insert(rng.below(len(words) + 1), oov_list[rng.below(len(oov_list))])
        if rng.random() < config.fact_fraction:
            s, rel, o = facts[rng.below(len(facts))]
            fact = [s, "is", "the", rel, "of", o]
            at = rng.below(len(words) + 1)
            words[at:at] = fact
        sentences.append(" ".join(words))

    vocabulary = frozenset({tok for s in sentences for tok in s.split()} - set(oov_list)) | frozenset(names)
    return SyntheticCorpus(graph, sentences, vocabulary, frozenset(oov_list), {w: iri[w] for w in names})
