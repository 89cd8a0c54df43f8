"""Knowledge-graph driven repair and rescoring of ASR N-best lists.

A hypothesis whose linked predicate and entity can be completed into a graph
triple by a third entity is checked for an unlinked token that sounds like,
or is spelled like, that entity. Such tokens are replaced, the hypothesis is
re-annotated, and the list is reranked by a mix of ASR score and coherence.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .annotator import AnnotatedSentence, Annotator
from .kg import KnowledgeGraph, Triple
from .strings import form_key, similarity, soundex

__all__ = [
    "Hypothesis",
    "NBestList",
    "Correction",
    "RescoredHypothesis",
    "coherence",
    "propose_corrections",
    "apply_corrections",
    "rescore",
    "read_nbest",
    "write_nbest",
    "corrections_log",
]


@dataclass(frozen=True)
class Hypothesis:
    utt_id: str
    rank: int
    asr_score: float
    text: str


@dataclass(frozen=True)
class NBestList:
    utt_id: str
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError(f"N-best list {self.utt_id!r} is empty")
        if any(h.utt_id != self.utt_id for h in self.hypotheses):
            raise ValueError(f"N-best list {self.utt_id!r} mixes utterance ids")
        ranks = sorted(h.rank for h in self.hypotheses)
        if ranks != list(range(1, len(ranks) + 1)):
            raise ValueError(f"ranks of {self.utt_id!r} must be 1..{len(ranks)}, got {ranks}")
        object.__setattr__(self, "hypotheses", tuple(sorted(self.hypotheses, key=lambda h: h.rank)))

    def __len__(self) -> int:
        return len(self.hypotheses)


@dataclass(frozen=True)
class Correction:
    token_index: int
    original_word: str
    replacement: str
    entity: str
    completed_triple: Triple
    similarity: float
    phonetic_match: bool = False

    def to_record(self) -> dict:
        t = self.completed_triple
        return {
            "token_index": self.token_index,
            "original_word": self.original_word,
            "replacement": self.replacement,
            "entity": self.entity,
            "completed_triple": [t.subject.value, t.predicate.value, t.object.value],
            "similarity": self.similarity,
            "phonetic_match": self.phonetic_match,
        }


@dataclass
class RescoredHypothesis:
    hypothesis: Hypothesis
    corrections: list[Correction]
    combined_score: float
    coherence: int = 0
    annotation: AnnotatedSentence | None = field(default=None, repr=False)


def _split_links(annotated: AnnotatedSentence, graph: KnowledgeGraph) -> tuple[list[str], list[str]]:
    entities = [e for e in dict.fromkeys(annotated.entities) if e in graph.entities]
    predicates = [e for e in dict.fromkeys(annotated.entities) if e in graph.predicates]
    return entities, predicates


def coherence(annotated: AnnotatedSentence, graph: KnowledgeGraph) -> int:
    """Connected entity pairs, plus linked predicates that join some linked pair."""
    entities, predicates = _split_links(annotated, graph)
    score = 0
    connected: list[list[Triple]] = []
    for a, b in itertools.combinations(entities, 2):
        found = graph.connecting_triples(a, b)
        if found:
            score += 1
            connected.append(found)
    for p in predicates:
        if any(t.predicate.value == p for found in connected for t in found):
            score += 1
    return score


def propose_corrections(
    annotated: AnnotatedSentence,
    annotator: Annotator,
    min_similarity: float = 0.6,
) -> list[Correction]:
    """Candidate token replacements that would complete a (predicate, entity) anchor."""
    graph, index = annotator.graph, annotator.index
    entities, predicates = _split_links(annotated, graph)
    linked = set(annotated.entities)
    taken = annotated.linked_positions()
    free = [
        (i, tok)
        for i, tok in enumerate(annotated.tokens)
        if i not in taken and tok not in annotator.stopwords
    ]
    if not free or not predicates or not entities:
        return []

    completions: dict[str, Triple] = {}
    for p in predicates:
        for e in entities:
            for t in graph.triples_matching(s=e, p=p) + graph.triples_matching(p=p, o=e):
                x = t.object if t.subject.value == e else t.subject
                if x.is_iri and x.value not in linked and x.value not in completions:
                    completions[x.value] = t

    found: dict[tuple[int, str], Correction] = {}
    for x, triple in completions.items():
        for i, tok in free:
            tok_key = soundex(tok)
            best = None
            for form in index.forms_for(x):
                sim = similarity(tok, form)
                phonetic = form_key(form) == tok_key
                if phonetic or sim >= min_similarity:
                    if best is None or (sim, phonetic) > (best[1], best[2]):
                        best = (form, sim, phonetic)
            if best is not None and (i, x) not in found:
                found[(i, x)] = Correction(i, tok, best[0], x, triple, best[1], best[2])
    return sorted(found.values(), key=lambda c: (-c.similarity, c.token_index, c.entity))


def _replace(tokens: list[str], corrections: Iterable[Correction]) -> list[str]:
    out = list(tokens)
    for c in corrections:
        out[c.token_index] = c.replacement
    return out


def apply_corrections(
    annotated: AnnotatedSentence,
    corrections: Iterable[Correction],
    annotator: Annotator,
) -> tuple[AnnotatedSentence, list[Correction]]:
    """Greedily apply corrections, best first, one per token and per entity.

    A correction that would lower coherence is skipped.
    """
    graph = annotator.graph
    current = annotated
    current_coh = coherence(annotated, graph)
    applied: list[Correction] = []
    used_tokens: set[int] = set()
    used_entities: set[str] = set()
    for c in corrections:
        if c.token_index in used_tokens or c.entity in used_entities:
            continue
        trial = annotator.annotate_tokens(" ".join(_replace(annotated.tokens, applied + [c])).split())
        trial_coh = coherence(trial, graph)
        if trial_coh < current_coh:
            continue
        applied.append(c)
        used_tokens.add(c.token_index)
        used_entities.add(c.entity)
        current, current_coh = trial, trial_coh
    return current, applied


def rescore(
    nbest: NBestList,
    annotator: Annotator,
    lam: float = 0.5,
    min_similarity: float = 0.6,
) -> list[RescoredHypothesis]:
    """Correct each hypothesis, then rank by ``lam * asr + (1 - lam) * coherence``.

    Both parts are normalized over the list: ASR scores min-max (a constant
    list maps to 1), coherence by the list maximum. Ties keep ASR rank order.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    hyps = nbest.hypotheses
    if not hyps:
        raise ValueError("empty N-best list")

    results = []
    for h in hyps:
        ann = annotator.annotate(h.text)
        proposals = propose_corrections(ann, annotator, min_similarity)
        final, applied = apply_corrections(ann, proposals, annotator)
        text = " ".join(final.tokens) if applied else h.text
        results.append((Hypothesis(h.utt_id, h.rank, h.asr_score, text), applied, final))

    lo = min(h.asr_score for h in hyps)
    hi = max(h.asr_score for h in hyps)
    cohs = [coherence(ann, annotator.graph) for _, _, ann in results]
    top_coh = max(1, max(cohs))
    out = []
    for (h, applied, ann), coh in zip(results, cohs):
        asr_norm = 1.0 if hi == lo else (h.asr_score - lo) / (hi - lo)
        combined = lam * asr_norm + (1.0 - lam) * coh / top_coh
        out.append(RescoredHypothesis(h, applied, combined, coh, ann))
    out.sort(key=lambda r: (-r.combined_score, r.hypothesis.rank))
    return out


# --- file formats -------------------------------------------------------------


def read_nbest(path: str | Path) -> list[NBestList]:
    """Read ``uttId<TAB>rank<TAB>asrScore<TAB>text`` lines, grouped by utterance in file order."""
    groups: dict[str, list[Hypothesis]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields, got {len(parts)}")
        utt, rank, score, text = parts
        try:
            hyp = Hypothesis(utt, int(rank), float(score), text)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad rank or score in {line!r}") from None
        groups.setdefault(utt, []).append(hyp)
    return [NBestList(utt, tuple(hs)) for utt, hs in groups.items()]


def write_nbest(path: str | Path, lists: Iterable[Iterable[Hypothesis]]) -> None:
    lines = []
    for hyps in lists:
        for h in hyps:
            lines.append(f"{h.utt_id}\t{h.rank}\t{h.asr_score!r}\t{h.text}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def corrections_log(utt_id: str, rescored: list[RescoredHypothesis]) -> dict:
    return {
        "utt_id": utt_id,
        "hypotheses": [
            {
                "original_rank": r.hypothesis.rank,
                "new_rank": new_rank,
                "text": r.hypothesis.text,
                "combined_score": r.combined_score,
                "coherence": r.coherence,
                "corrections": [c.to_record() for c in r.corrections],
            }
            for new_rank, r in enumerate(rescored, 1)
        ],
    }


def dump_corrections_log(path: str | Path, logs: list[dict]) -> None:
    Path(path).write_text(json.dumps(logs, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
