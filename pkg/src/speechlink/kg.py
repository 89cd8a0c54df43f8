"""N-Triples subset parser and an immutable, fully indexed in-memory graph."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping
from urllib.parse import unquote

__all__ = [
    "RDFS_LABEL",
    "Term",
    "Triple",
    "IRI",
    "Literal",
    "NTriplesParseError",
    "KnowledgeGraph",
    "parse_ntriples",
    "serialize_ntriples",
    "read_ntriples",
    "load_graph",
    "local_name",
]

RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"


@dataclass(frozen=True, slots=True)
class Term:
    kind: str  # "iri" | "literal"
    value: str
    lang: str | None = None
    datatype: str | None = None

    def __post_init__(self):
        if self.kind == "iri":
            if self.lang is not None or self.datatype is not None:
                raise ValueError("IRI terms carry no language tag or datatype")
        elif self.kind == "literal":
            if self.lang is not None and self.datatype is not None:
                raise ValueError("a literal has a language tag or a datatype, not both")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == "iri"

    @property
    def is_literal(self) -> bool:
        return self.kind == "literal"

    def n3(self) -> str:
        if self.is_iri:
            return f"<{self.value}>"
        out = '"' + _escape_literal(self.value) + '"'
        if self.lang:
            out += "@" + self.lang
        elif self.datatype:
            out += f"^^<{self.datatype}>"
        return out


def IRI(value: str) -> Term:
    return Term("iri", value)


def Literal(value: str, lang: str | None = None, datatype: str | None = None) -> Term:
    return Term("literal", value, lang, datatype)


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if not (self.subject.is_iri and self.predicate.is_iri):
            raise ValueError("subject and predicate must be IRIs")

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


class NTriplesParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {line!r}")


# --- parsing ---------------------------------------------------------------

_IRI = r'<((?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>'
_LITERAL = (
    r'"((?:[^"\\\n\r]|\\[tbnrf"\'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)"'
    r"(?:@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)|\^\^" + _IRI + ")?"
)
_STATEMENT = re.compile(
    r"[ \t]*" + _IRI + r"[ \t]*" + _IRI + r"[ \t]*(?:" + _IRI + "|" + _LITERAL + r")[ \t]*\.[ \t]*(?:#.*)?"
)
_ESCAPES = re.compile(r'\\(?:([tbnrf"\'\\])|u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8}))')
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str) -> str:
    def repl(m: re.Match) -> str:
        if m.group(1):
            return _ECHAR[m.group(1)]
        return chr(int(m.group(2) or m.group(3), 16))

    return _ESCAPES.sub(repl, text)


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _parse_line(lineno: int, line: str) -> Triple:
    m = _STATEMENT.fullmatch(line)
    if m is None:
        reason = "blank nodes are not supported" if "_:" in line else "malformed statement"
        raise NTriplesParseError(lineno, line, reason)
    s, p, o_iri, lit, lang, dtype = m.groups()
    try:
        if o_iri is not None:
            obj = IRI(_unescape(o_iri))
        else:
            obj = Literal(_unescape(lit), lang, _unescape(dtype) if dtype is not None else None)
        return Triple(IRI(_unescape(s)), IRI(_unescape(p)), obj)
    except ValueError as exc:  # e.g. \u escape for a surrogate
        raise NTriplesParseError(lineno, line, str(exc)) from None


def parse_ntriples(text: str) -> list[Triple]:
    """Parse an N-Triples document into triples in file order.

    Duplicates are kept; :func:`load_graph` removes them.
    """
    triples = []
    # split on "\n" only: str.splitlines also breaks on U+2028 etc., which may
    # legitimately occur inside literals
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.rstrip("\r")
        stripped = line.strip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        triples.append(_parse_line(lineno, line))
    return triples


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    return "".join(t.n3() + "\n" for t in triples)


def read_ntriples(path: str | Path) -> list[Triple]:
    return parse_ntriples(Path(path).read_text(encoding="utf-8"))


# --- the graph ---------------------------------------------------------------


def local_name(iri: str) -> str:
    """Fragment or last path segment of an IRI, percent-decoded, underscores as spaces."""
    cut = max(iri.rfind("#"), iri.rfind("/"), iri.rfind(":") if "/" not in iri else -1)
    return unquote(iri[cut + 1 :]).replace("_", " ")


class KnowledgeGraph:
    """Deduplicated triples with subject/predicate/object indexes.

    Built by :func:`load_graph`; nothing mutates it afterwards, so one
    instance can be shared between threads.
    """

    __slots__ = ("_triples", "_by_s", "_by_p", "_by_o", "_support", "_entities", "_predicates")

    def __init__(self, triples: Iterable[Triple] = ()):
        uniq = tuple(dict.fromkeys(triples))
        by_s: dict[str, list[int]] = {}
        by_p: dict[str, list[int]] = {}
        by_o: dict[Term, list[int]] = {}
        support: dict[str, int] = {}
        for i, t in enumerate(uniq):
            by_s.setdefault(t.subject.value, []).append(i)
            by_p.setdefault(t.predicate.value, []).append(i)
            by_o.setdefault(t.object, []).append(i)
            support[t.subject.value] = support.get(t.subject.value, 0) + 1
            if t.object.is_iri:
                support[t.object.value] = support.get(t.object.value, 0) + 1
        self._triples = uniq
        self._by_s = MappingProxyType({k: tuple(v) for k, v in by_s.items()})
        self._by_p = MappingProxyType({k: tuple(v) for k, v in by_p.items()})
        self._by_o = MappingProxyType({k: tuple(v) for k, v in by_o.items()})
        self._support = MappingProxyType(support)
        self._entities = frozenset(support)
        self._predicates = frozenset(by_p)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: object) -> bool:
        if not isinstance(triple, Triple):
            return False
        return bool(self.triples_matching(triple.subject.value, triple.predicate.value, triple.object))

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    @property
    def entities(self) -> frozenset[str]:
        """IRIs occurring in subject or object position."""
        return self._entities

    @property
    def predicates(self) -> frozenset[str]:
        return self._predicates

    @property
    def support_counts(self) -> Mapping[str, int]:
        return self._support

    def triples_matching(
        self, s: str | None = None, p: str | None = None, o: Term | str | None = None
    ) -> list[Triple]:
        """Triples matching every bound position, in load order.

        ``o`` may be a :class:`Term` or a bare IRI string.
        """
        if isinstance(o, str):
            o = IRI(o)
        candidates = []
        if s is not None:
            candidates.append(self._by_s.get(s, ()))
        if p is not None:
            candidates.append(self._by_p.get(p, ()))
        if o is not None:
            candidates.append(self._by_o.get(o, ()))
        if not candidates:
            return list(self._triples)
        smallest = min(candidates, key=len)
        out = []
        for i in smallest:
            t = self._triples[i]
            if s is not None and t.subject.value != s:
                continue
            if p is not None and t.predicate.value != p:
                continue
            if o is not None and t.object != o:
                continue
            out.append(t)
        return out

    def connecting_triples(self, e1: str, e2: str) -> list[Triple]:
        """Triples linking ``e1`` and ``e2`` in either direction."""
        if e1 == e2:
            raise ValueError("connecting_triples needs two distinct entities")
        forward = set(self._by_s.get(e1, ())) & set(self._by_o.get(IRI(e2), ()))
        backward = set(self._by_s.get(e2, ())) & set(self._by_o.get(IRI(e1), ()))
        return [self._triples[i] for i in sorted(forward | backward)]

    def support(self, e: str) -> int:
        """Subject/object occurrence count of ``e`` (0 for unknown IRIs)."""
        return self._support.get(e, 0)

    def entity_description(self, e: str) -> list[Triple]:
        return [self._triples[i] for i in self._by_s.get(e, ())]

    def incoming(self, e: str) -> list[Triple]:
        return [self._triples[i] for i in self._by_o.get(IRI(e), ())]

    def labels(self, e: str, label_predicates: Iterable[str] = (RDFS_LABEL,)) -> list[str]:
        preds = set(label_predicates)
        return [
            t.object.value
            for t in self.entity_description(e)
            if t.predicate.value in preds and t.object.is_literal
        ]


def load_graph(triples: Iterable[Triple]) -> KnowledgeGraph:
    return KnowledgeGraph(triples)
