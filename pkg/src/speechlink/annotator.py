"""Mention spotting and Spotlight-style entity disambiguation.

Each candidate entity gets three component scores: a prior from its graph
support, a likelihood from string similarity between the mention and the
entity's surface forms, and a contextual score (TF-IDF cosine between the
rest of the sentence and the entity's neighbourhood). They are combined
log-linearly into ``final_score``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .kg import RDFS_LABEL, KnowledgeGraph, local_name
from .strings import normalize, similarity
from .surface import SurfaceFormIndex, lookup_exact, lookup_fuzzy

__all__ = [
    "EPSILON",
    "Weights",
    "Mention",
    "CandidateScore",
    "ScoredLink",
    "AnnotatedSentence",
    "Annotator",
    "load_stopwords",
    "default_stopwords",
    "tokenize",
    "spot",
    "context_model",
    "contextual_score",
    "disambiguate",
    "annotate",
]

EPSILON = 1e-9
# fuzzy spotting ignores matches weaker than this, whatever max_dist allows
FUZZY_SPOT_FLOOR = 0.5


@dataclass(frozen=True)
class Weights:
    prior: float = 1.0
    likelihood: float = 1.0
    context: float = 1.0

    def __post_init__(self):
        if min(self.prior, self.likelihood, self.context) < 0:
            raise ValueError("weights must be non-negative")

    def scaled(self, c: float) -> Weights:
        return Weights(self.prior * c, self.likelihood * c, self.context * c)


@dataclass(frozen=True)
class Mention:
    start: int
    end: int
    surface: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad mention span [{self.start}, {self.end})")


@dataclass(frozen=True)
class CandidateScore:
    entity: str
    prior: float
    likelihood: float
    contextual_score: float
    support: int
    log_score: float

    @property
    def final_score(self) -> float:
        return min(1.0, math.exp(self.log_score))


@dataclass(frozen=True)
class ScoredLink:
    entity: str
    prior: float
    likelihood: float
    contextual_score: float
    support: int
    topic_pertinence: float
    percentage_of_second_rank: float
    contextual_ambiguity: float
    final_score: float


@dataclass
class AnnotatedSentence:
    tokens: list[str]
    links: list[tuple[Mention, ScoredLink]] = field(default_factory=list)

    @property
    def entities(self) -> list[str]:
        return [link.entity for _, link in self.links]

    def linked_positions(self) -> set[int]:
        return {i for m, _ in self.links for i in range(m.start, m.end)}

    def to_record(self, sentence_id: str | None = None) -> dict:
        return {
            "id": sentence_id,
            "tokens": list(self.tokens),
            "links": [
                {"start": m.start, "end": m.end, "surface": m.surface, **asdict(link)}
                for m, link in self.links
            ],
        }


# --- stopwords ----------------------------------------------------------------


def load_stopwords(path: str | Path) -> frozenset[str]:
    text = Path(path).read_text(encoding="utf-8")
    return _parse_stopwords(text)


def _parse_stopwords(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.update(normalize(line).split())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    return _parse_stopwords(resources.files("speechlink.data").joinpath("stopwords.txt").read_text("utf-8"))


# --- pure pieces -----------------------------------------------------------------


def tokenize(sentence: str) -> list[str]:
    return normalize(sentence).split()


def spot(
    tokens: Sequence[str],
    index: SurfaceFormIndex,
    stopwords: Iterable[str] | None = None,
    fuzzy_max_dist: int | None = None,
) -> list[Mention]:
    """Greedy left-to-right longest match against the exact surface map.

    Spans made only of stopwords are skipped. With ``fuzzy_max_dist`` set, a
    position with no exact match may still open a mention whose n-gram is
    within that many character edits of some surface form.
    """
    stop = default_stopwords() if stopwords is None else frozenset(stopwords)
    mentions = []
    i = 0
    n = len(tokens)
    while i < n:
        found = None
        for width in range(min(index.max_form_tokens, n - i), 0, -1):
            span = tokens[i : i + width]
            if all(t in stop for t in span):
                continue
            surface = " ".join(span)
            if surface in index.exact_map:
                found = Mention(i, i + width, surface)
                break
        if found is None and fuzzy_max_dist is not None:
            for width in range(min(index.max_form_tokens, n - i), 0, -1):
                span = tokens[i : i + width]
                if any(t in stop for t in span):
                    continue
                surface = " ".join(span)
                hits = lookup_fuzzy(index, surface, fuzzy_max_dist)
                if hits and hits[0][1] >= FUZZY_SPOT_FLOOR:
                    found = Mention(i, i + width, surface)
                    break
        if found is None:
            i += 1
        else:
            mentions.append(found)
            i = found.end
    return mentions


def context_model(
    graph: KnowledgeGraph, e: str, label_predicates: Iterable[str] = (RDFS_LABEL,)
) -> Counter:
    """Bag of normalized tokens describing ``e``.

    Literals of ``e`` (its labels included), labels of its neighbours in
    either direction, and local names of the predicates on those triples.
    """
    label_predicates = tuple(label_predicates)
    bag: Counter = Counter()
    for t in graph.entity_description(e):
        bag.update(normalize(local_name(t.predicate.value)).split())
        if t.object.is_literal:
            bag.update(normalize(t.object.value).split())
        elif t.object.value != e:
            for label in graph.labels(t.object.value, label_predicates):
                bag.update(normalize(label).split())
    for t in graph.incoming(e):
        bag.update(normalize(local_name(t.predicate.value)).split())
        if t.subject.value != e:
            for label in graph.labels(t.subject.value, label_predicates):
                bag.update(normalize(label).split())
    return bag


def _weighted(bag: Mapping[str, int], idf: Mapping[str, float] | None) -> dict[str, float]:
    if idf is None:
        return {t: float(c) for t, c in bag.items() if c > 0}
    return {t: c * idf[t] for t, c in bag.items() if c > 0 and t in idf}


def _cosine(u: Mapping[str, float], v: Mapping[str, float]) -> float:
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v.get(t, 0.0) for t, w in u.items())
    if dot == 0.0:
        return 0.0
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    return max(0.0, min(1.0, dot / (nu * nv)))


def contextual_score(
    sentence_context: Mapping[str, int],
    entity_model: Mapping[str, int],
    idf: Mapping[str, float] | None = None,
) -> float:
    """TF-IDF cosine of two bags. Terms missing from ``idf`` are ignored;
    with ``idf=None`` every term weighs 1."""
    return _cosine(_weighted(sentence_context, idf), _weighted(entity_model, idf))


def smoothed_idf(models: Iterable[Mapping[str, int]]) -> dict[str, float]:
    df: Counter = Counter()
    n = 0
    for bag in models:
        n += 1
        df.update(t for t, c in bag.items() if c > 0)
    return {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in df.items()}


# --- the linker -------------------------------------------------------------------


class Annotator:
    """Spotting plus disambiguation over one graph and surface index.

    Entity context vectors and IDF are computed lazily and cached, so reuse
    one instance for a whole corpus.
    """

    def __init__(
        self,
        graph: KnowledgeGraph,
        index: SurfaceFormIndex,
        weights: Weights = Weights(),
        stopwords: Iterable[str] | None = None,
        fuzzy: bool = False,
        fuzzy_max_dist: int = 2,
        label_predicates: Iterable[str] = (RDFS_LABEL,),
    ):
        self.graph = graph
        self.index = index
        self.weights = weights
        self.stopwords = default_stopwords() if stopwords is None else frozenset(stopwords)
        self.fuzzy = fuzzy
        self.fuzzy_max_dist = fuzzy_max_dist
        self.label_predicates = tuple(label_predicates)
        self.total_support = sum(graph.support_counts.values())
        self._idf: dict[str, float] | None = None
        self._vectors: dict[str, dict[str, float]] = {}

    @property
    def idf(self) -> dict[str, float]:
        if self._idf is None:
            self._idf = smoothed_idf(self.context_model(e) for e in sorted(self.graph.entities))
        return self._idf

    def context_model(self, e: str) -> Counter:
        return context_model(self.graph, e, self.label_predicates)

    def _entity_vector(self, e: str) -> dict[str, float]:
        vec = self._vectors.get(e)
        if vec is None:
            vec = self._vectors[e] = _weighted(self.context_model(e), self.idf)
        return vec

    def prior(self, e: str) -> float:
        if self.total_support == 0:
            return 0.0
        return self.graph.support(e) / self.total_support

    def likelihood(self, surface: str, e: str) -> float:
        surface = normalize(surface)
        return max((similarity(surface, f) for f in self.index.forms_for(e)), default=0.0)

    def spot(self, tokens: Sequence[str]) -> list[Mention]:
        return spot(tokens, self.index, self.stopwords, self.fuzzy_max_dist if self.fuzzy else None)

    def candidates(self, mention: Mention) -> list[str]:
        exact = lookup_exact(self.index, mention.surface)
        if exact:
            return sorted(exact)
        if self.fuzzy:
            return sorted(iri for iri, _ in lookup_fuzzy(self.index, mention.surface, self.fuzzy_max_dist))
        return []

    def score_candidates(
        self, mention: Mention, candidates: Iterable[str], sentence_context: Mapping[str, int]
    ) -> list[CandidateScore]:
        """Score every candidate; best first, ties broken by IRI."""
        w = self.weights
        ctx_vec = _weighted(sentence_context, self.idf)
        scored = []
        for e in dict.fromkeys(candidates):
            prior = self.prior(e)
            lik = self.likelihood(mention.surface, e)
            ctx = _cosine(ctx_vec, self._entity_vector(e))
            log_score = (
                w.prior * math.log(prior + EPSILON)
                + w.likelihood * math.log(lik + EPSILON)
                + w.context * math.log(ctx + EPSILON)
            )
            scored.append(CandidateScore(e, prior, lik, ctx, self.graph.support(e), log_score))
        scored.sort(key=lambda c: (-c.log_score, c.entity))
        return scored

    def disambiguate(
        self, mention: Mention, candidates: Iterable[str], sentence_context: Mapping[str, int]
    ) -> ScoredLink:
        ranked = self.score_candidates(mention, candidates, sentence_context)
        if not ranked:
            raise ValueError(f"no candidates for mention {mention.surface!r}")
        best = ranked[0]
        if len(ranked) > 1:
            # ratio of exp() values, taken in log space to stay exact for tiny scores
            second = min(1.0, math.exp(ranked[1].log_score - best.log_score))
            ambiguity = 1.0 - second
        else:
            second, ambiguity = 0.0, 1.0
        return ScoredLink(
            entity=best.entity,
            prior=best.prior,
            likelihood=best.likelihood,
            contextual_score=best.contextual_score,
            support=best.support,
            topic_pertinence=best.contextual_score,
            percentage_of_second_rank=second,
            contextual_ambiguity=ambiguity,
            final_score=best.final_score,
        )

    def annotate_tokens(self, tokens: Sequence[str]) -> AnnotatedSentence:
        tokens = list(tokens)
        links = []
        for m in self.spot(tokens):
            cands = self.candidates(m)
            if not cands:
                continue
            context = Counter(tokens[: m.start] + tokens[m.end :])
            links.append((m, self.disambiguate(m, cands, context)))
        return AnnotatedSentence(tokens, links)

    def annotate(self, sentence: str) -> AnnotatedSentence:
        return self.annotate_tokens(tokenize(sentence))


@lru_cache(maxsize=8)
def _cached_annotator(graph: KnowledgeGraph, index: SurfaceFormIndex, weights: Weights) -> Annotator:
    return Annotator(graph, index, weights)


def disambiguate(
    mention: Mention,
    candidates: Sequence[str],
    sentence_context: Mapping[str, int],
    graph: KnowledgeGraph,
    index: SurfaceFormIndex,
    weights: Weights = Weights(),
) -> ScoredLink:
    return _cached_annotator(graph, index, weights).disambiguate(mention, candidates, sentence_context)


def annotate(
    sentence: str, graph: KnowledgeGraph, index: SurfaceFormIndex, weights: Weights = Weights()
) -> AnnotatedSentence:
    return _cached_annotator(graph, index, weights).annotate(sentence)
