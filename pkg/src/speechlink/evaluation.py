"""WER alignment, entity-count reports and score histograms for transcript corpora."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .annotator import AnnotatedSentence, Annotator

__all__ = [
    "Alignment",
    "EvalReport",
    "Histogram",
    "align",
    "wer",
    "entity_ratio",
    "corpus_report",
    "entity_diff_histogram",
    "pertinence_stats",
    "emit_report",
    "read_histogram_csv",
    "read_transcripts",
    "pair_transcripts",
    "REPORT_HEADER",
]

MATCH, SUB, DEL, INS = "match", "sub", "del", "ins"


@dataclass(frozen=True)
class Alignment:
    ops: tuple[tuple[str, str | None, str | None], ...]

    @property
    def substitutions(self) -> int:
        return sum(op == SUB for op, _, _ in self.ops)

    @property
    def deletions(self) -> int:
        return sum(op == DEL for op, _, _ in self.ops)

    @property
    def insertions(self) -> int:
        return sum(op == INS for op, _, _ in self.ops)

    @property
    def matches(self) -> int:
        return sum(op == MATCH for op, _, _ in self.ops)

    @property
    def errors(self) -> int:
        return len(self.ops) - self.matches

    @property
    def ref_length(self) -> int:
        return self.matches + self.substitutions + self.deletions


def align(ref: Sequence[str], hyp: Sequence[str]) -> Alignment:
    """Minimal unit-cost alignment.

    Among equal-cost paths the backtrace (from the end) prefers match, then
    substitution, then deletion, then insertion.
    """
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        row, up, r = d[i], d[i - 1], ref[i - 1]
        for j in range(1, m + 1):
            row[j] = min(up[j - 1] + (r != hyp[j - 1]), up[j] + 1, row[j - 1] + 1)

    ops = []
    i, j = n, m
    while i or j:
        if i and j and ref[i - 1] == hyp[j - 1] and d[i][j] == d[i - 1][j - 1]:
            ops.append((MATCH, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i and j and d[i][j] == d[i - 1][j - 1] + 1:
            ops.append((SUB, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i and d[i][j] == d[i - 1][j] + 1:
            ops.append((DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append((INS, None, hyp[j - 1]))
            j -= 1
    return Alignment(tuple(reversed(ops)))


def wer(alignments: Iterable[Alignment]) -> float:
    """Corpus-pooled word error rate in percent."""
    errors = words = 0
    for a in alignments:
        errors += a.errors
        words += a.ref_length
    if words == 0:
        raise ValueError("WER is undefined for an empty reference corpus")
    return 100.0 * errors / words


def entity_ratio(entities_test: int, entities_ref: int) -> float | None:
    """``test / ref`` rounded half-even to two decimals; None when ref is 0."""
    if entities_ref == 0:
        return None
    q = (Decimal(entities_test) / Decimal(entities_ref)).quantize(Decimal("0.01"), ROUND_HALF_EVEN)
    return float(q)


REPORT_HEADER = ("label", "wer_percent", "sentences", "entities_ref", "entities_test", "ratio")


@dataclass(frozen=True)
class EvalReport:
    label: str
    wer_percent: float
    num_sentences: int
    entities_ref: int
    entities_test: int

    @property
    def ratio(self) -> float | None:
        return entity_ratio(self.entities_test, self.entities_ref)

    def row(self) -> list[str]:
        ratio = self.ratio
        return [
            self.label,
            f"{self.wer_percent:.2f}",
            str(self.num_sentences),
            str(self.entities_ref),
            str(self.entities_test),
            "" if ratio is None else f"{ratio:.2f}",
        ]


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    mean: float | None
    variance: float | None
    samples: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.counts and len(self.counts) != len(self.bin_edges) - 1:
            raise ValueError("need exactly one more edge than counts")

    @property
    def defined(self) -> bool:
        return self.mean is not None

    @property
    def total(self) -> int:
        return sum(self.counts)

    def bins(self) -> list[tuple[float, float, int]]:
        return [(self.bin_edges[k], self.bin_edges[k + 1], c) for k, c in enumerate(self.counts)]

    def mass_below(self, x: float) -> int:
        return sum(c for lo, hi, c in self.bins() if hi <= x)

    def mass_above(self, x: float) -> int:
        return sum(c for lo, hi, c in self.bins() if lo >= x)


def _moments(xs: Sequence[float]) -> tuple[float, float]:
    mean = math.fsum(xs) / len(xs)
    return mean, math.fsum((x - mean) ** 2 for x in xs) / len(xs)


# --- corpus level --------------------------------------------------------------


def _check_pairing(refs: Sequence, hyps: Sequence) -> None:
    if len(refs) != len(hyps):
        raise ValueError(f"reference corpus has {len(refs)} sentences but hypothesis corpus has {len(hyps)}")


def _annotate_all(sentences: Iterable[str], annotator: Annotator) -> list[AnnotatedSentence]:
    return [annotator.annotate(s) for s in sentences]


def corpus_report(
    label: str,
    refs: Sequence[str],
    hyps: Sequence[str],
    annotator: Annotator,
    ref_annotations: Sequence[AnnotatedSentence] | None = None,
    hyp_annotations: Sequence[AnnotatedSentence] | None = None,
) -> EvalReport:
    """Table-style summary: pooled WER plus entity link counts on both sides.

    Annotations may be passed in when the caller already has them.
    """
    _check_pairing(refs, hyps)
    if not refs:
        raise ValueError("empty corpus")
    ref_ann = ref_annotations if ref_annotations is not None else _annotate_all(refs, annotator)
    hyp_ann = hyp_annotations if hyp_annotations is not None else _annotate_all(hyps, annotator)
    alignments = [align(r.tokens, h.tokens) for r, h in zip(ref_ann, hyp_ann)]
    return EvalReport(
        label=label,
        wer_percent=wer(alignments),
        num_sentences=len(refs),
        entities_ref=sum(len(a.links) for a in ref_ann),
        entities_test=sum(len(a.links) for a in hyp_ann),
    )


def integer_histogram(values: Sequence[int]) -> Histogram:
    """Unit-width bins centred on integers, spanning min..max."""
    if not values:
        return Histogram((), (), None, None)
    lo, hi = min(values), max(values)
    counts = [0] * (hi - lo + 1)
    for v in values:
        counts[v - lo] += 1
    edges = tuple(k - 0.5 for k in range(lo, hi + 2))
    return Histogram(edges, tuple(counts), *_moments(values), samples=tuple(values))


def entity_diff_histogram(
    ref_annotations: Sequence[AnnotatedSentence], hyp_annotations: Sequence[AnnotatedSentence]
) -> Histogram:
    """Per-sentence ``ref links - test links``."""
    _check_pairing(ref_annotations, hyp_annotations)
    return integer_histogram([len(r.links) - len(h.links) for r, h in zip(ref_annotations, hyp_annotations)])


def pertinence_stats(annotations: Iterable[AnnotatedSentence], bins: int = 20) -> Histogram:
    """Topic-pertinence distribution of every link, on ``bins`` equal bins over [0, 1]."""
    values = [link.topic_pertinence for a in annotations for _, link in a.links]
    edges = tuple(k / bins for k in range(bins + 1))
    if not values:
        return Histogram(edges, (0,) * bins, None, None)
    counts = [0] * bins
    for v in values:
        counts[min(bins - 1, int(v * bins))] += 1
    return Histogram(edges, tuple(counts), *_moments(values), samples=tuple(values))


# --- files ----------------------------------------------------------------------


def read_transcripts(path: str | Path) -> list[tuple[str, str]]:
    """``uttId<TAB>text`` lines; ids must be unique."""
    out = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        utt, sep, text = line.partition("\t")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'uttId<TAB>text'")
        if utt in seen:
            raise ValueError(f"{path}:{lineno}: duplicate utterance id {utt!r}")
        seen.add(utt)
        out.append((utt, text))
    return out


def write_transcripts(path: str | Path, items: Iterable[tuple[str, str]]) -> None:
    Path(path).write_text("".join(f"{u}\t{t}\n" for u, t in items), encoding="utf-8")


def pair_transcripts(
    refs: Sequence[tuple[str, str]], hyps: Sequence[tuple[str, str]]
) -> tuple[list[str], list[str], list[str]]:
    """Match hypothesis lines to reference lines by utterance id (reference order)."""
    hyp_by_id = dict(hyps)
    ref_ids = [u for u, _ in refs]
    missing = [u for u in ref_ids if u not in hyp_by_id]
    extra = sorted(set(hyp_by_id) - set(ref_ids))
    if missing or extra:
        raise ValueError(
            f"utterance ids differ: {len(refs)} reference vs {len(hyps)} hypothesis lines; "
            f"missing from hypotheses {missing[:5]}, unknown in hypotheses {extra[:5]}"
        )
    return ref_ids, [t for _, t in refs], [hyp_by_id[u] for u in ref_ids]


def _histogram_csv(h: Histogram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_low", "bin_high", "count"])
    for lo, hi, c in h.bins():
        w.writerow([repr(float(lo)), repr(float(hi)), c])
    w.writerow(["# mean", "" if h.mean is None else repr(h.mean)])
    w.writerow(["# variance", "" if h.variance is None else repr(h.variance)])
    return buf.getvalue()


def read_histogram_csv(path: str | Path) -> Histogram:
    edges: list[float] = []
    counts = []
    mean = variance = None
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        if row[0] == "# mean":
            mean = float(row[1]) if row[1] else None
        elif row[0] == "# variance":
            variance = float(row[1]) if row[1] else None
        else:
            lo, hi, c = float(row[0]), float(row[1]), int(row[2])
            if not edges:
                edges.append(lo)
            edges.append(hi)
            counts.append(c)
    return Histogram(tuple(edges), tuple(counts), mean, variance)


def _svg_bars(h: Histogram, title: str) -> str:
    width, height, pad = 480, 240, 30
    n = max(1, len(h.counts))
    top = max(h.counts, default=0) or 1
    bar_w = (width - 2 * pad) / n
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{pad}" y="18" font-size="12" font-family="sans-serif">{title}</text>',
    ]
    for k, (lo, hi, c) in enumerate(h.bins()):
        bh = (height - 2 * pad) * c / top
        x = pad + k * bar_w
        parts.append(
            f'<rect x="{x:.2f}" y="{height - pad - bh:.2f}" width="{bar_w * 0.9:.2f}" '
            f'height="{bh:.2f}" fill="steelblue"><title>[{lo:g}, {hi:g}): {c}</title></rect>'
        )
    parts.append(
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>'
    )
    if h.bin_edges:
        parts.append(
            f'<text x="{pad}" y="{height - 10}" font-size="10" font-family="sans-serif">{h.bin_edges[0]:g}</text>'
        )
        parts.append(
            f'<text x="{width - pad}" y="{height - 10}" font-size="10" font-family="sans-serif" '
            f'text-anchor="end">{h.bin_edges[-1]:g}</text>'
        )
    parts.append("</svg>\n")
    return "\n".join(parts)


def emit_report(
    reports: Sequence[EvalReport],
    histograms: Mapping[str, Histogram],
    out_dir: str | Path,
    svg: bool = False,
) -> list[Path]:
    """Write ``report.csv`` plus one ``<name>.csv`` (and optional ``.svg``) per histogram.

    Everything is rendered before the first file is touched, so a bad input
    leaves the directory unchanged.
    """
    if not reports:
        raise ValueError("nothing to report: no test sets")
    if any(r.num_sentences == 0 for r in reports):
        raise ValueError("refusing to report an empty corpus")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in reports:
        w.writerow(r.row())
    files = {"report.csv": buf.getvalue()}
    for name, h in histograms.items():
        files[f"{name}.csv"] = _histogram_csv(h)
        if svg:
            files[f"{name}.svg"] = _svg_bars(h, name)

    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for fname, text in files.items():
            path = out / fname
            path.write_text(text, encoding="utf-8")
            written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write report to {exc.filename or out}: {exc.strerror}") from exc
    return written
