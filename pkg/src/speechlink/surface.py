"""Surface-form index: normalized strings that name graph entities and predicates."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .kg import RDFS_LABEL, KnowledgeGraph, local_name
from .strings import form_key, levenshtein, normalize, soundex

__all__ = [
    "SurfaceForm",
    "SurfaceFormIndex",
    "build_index",
    "lookup_exact",
    "lookup_fuzzy",
    "phonetic_key",
    "read_surface_tsv",
]

phonetic_key = soundex


@dataclass(frozen=True, slots=True)
class SurfaceForm:
    normalized: str
    source_iri: str
    origin: str  # "label" | "local-name" | "supplementary"


@dataclass(frozen=True, eq=False)
class SurfaceFormIndex:
    exact_map: Mapping[str, frozenset[str]]
    phonetic_map: Mapping[str, frozenset[str]]
    forms_of: Mapping[str, tuple[str, ...]]
    forms: tuple[SurfaceForm, ...] = ()
    max_form_tokens: int = 3

    def __len__(self) -> int:
        return len(self.exact_map)

    def forms_for(self, iri: str) -> tuple[str, ...]:
        return self.forms_of.get(iri, ())


def _freeze(d: dict[str, set[str]]) -> Mapping[str, frozenset[str]]:
    return MappingProxyType({k: frozenset(v) for k, v in d.items()})


def build_index(
    graph: KnowledgeGraph,
    label_predicates: Iterable[str] = (RDFS_LABEL,),
    extra_forms: Iterable[tuple[str, str]] = (),
    max_form_tokens: int = 3,
) -> SurfaceFormIndex:
    """Index label literals plus the local names of every entity and predicate.

    ``extra_forms`` are ``(surface, iri)`` pairs, e.g. from
    :func:`read_surface_tsv`; their IRIs must occur in the graph.
    """
    label_predicates = frozenset(label_predicates)
    if not label_predicates:
        raise ValueError("need at least one label predicate")
    if max_form_tokens < 1:
        raise ValueError("max_form_tokens must be positive")

    forms: list[SurfaceForm] = []
    for t in graph:
        if t.predicate.value in label_predicates and t.object.is_literal:
            forms.append(SurfaceForm(normalize(t.object.value), t.subject.value, "label"))
    for iri in sorted(graph.entities | graph.predicates):
        forms.append(SurfaceForm(normalize(local_name(iri)), iri, "local-name"))
    known = graph.entities | graph.predicates
    for surface, iri in extra_forms:
        if iri not in known:
            raise ValueError(f"supplementary form {surface!r} points at {iri}, which is not in the graph")
        forms.append(SurfaceForm(normalize(surface), iri, "supplementary"))
    forms = [f for f in forms if f.normalized]

    exact: dict[str, set[str]] = {}
    phonetic: dict[str, set[str]] = {}
    forms_of: dict[str, dict[str, None]] = {}
    for f in forms:
        exact.setdefault(f.normalized, set()).add(f.source_iri)
        phonetic.setdefault(form_key(f.normalized), set()).add(f.source_iri)
        forms_of.setdefault(f.source_iri, {})[f.normalized] = None
    return SurfaceFormIndex(
        exact_map=_freeze(exact),
        phonetic_map=_freeze(phonetic),
        forms_of=MappingProxyType({k: tuple(v) for k, v in forms_of.items()}),
        forms=tuple(forms),
        max_form_tokens=max_form_tokens,
    )


def lookup_exact(index: SurfaceFormIndex, surface: str) -> frozenset[str]:
    return index.exact_map.get(normalize(surface), frozenset())


def lookup_fuzzy(index: SurfaceFormIndex, surface: str, max_dist: int) -> list[tuple[str, float]]:
    """All IRIs with a form within ``max_dist`` edits, best similarity per IRI.

    Sorted by similarity (descending), then IRI.
    """
    if max_dist < 0:
        raise ValueError("max_dist must be non-negative")
    query = normalize(surface)
    best: dict[str, float] = {}
    for form, iris in index.exact_map.items():
        d = levenshtein(query, form, max_dist)
        if d > max_dist:
            continue
        longest = max(len(query), len(form))
        sim = 1.0 - d / longest if longest else 1.0
        for iri in iris:
            if sim > best.get(iri, -1.0):
                best[iri] = sim
    return sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))


def read_surface_tsv(path: str | Path) -> list[tuple[str, str]]:
    """Read ``surface<TAB>iri`` lines (blank lines and ``#`` comments skipped)."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"{path}:{lineno}: expected 'surface<TAB>iri', got {line!r}")
        pairs.append((parts[0], parts[1].strip()))
    return pairs
