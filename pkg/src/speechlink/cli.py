"""``speechlink`` command line: annotate, correct, simulate, evaluate, synth."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .annotator import Annotator, Weights, default_stopwords, load_stopwords, tokenize
from .corrector import Hypothesis, corrections_log, dump_corrections_log, read_nbest, rescore, write_nbest
from .evaluation import (
    corpus_report,
    emit_report,
    entity_diff_histogram,
    pair_transcripts,
    pertinence_stats,
    read_transcripts,
    write_transcripts,
)
from .kg import RDFS_LABEL, NTriplesParseError, load_graph, read_ntriples, serialize_ntriples
from .simulator import ErrorModel, corrupt, derive_seed, generate_nbest
from .surface import build_index, read_surface_tsv

GRAPH_ENV = "SPEECHLINK_GRAPH"


class UsageError(Exception):
    """Bad arguments or missing inputs (exit status 2)."""


@dataclass
class CliConfig:
    graph_path: Path | None = None
    stopword_path: Path | None = None
    weights: Weights = field(default_factory=Weights)
    lam: float = 0.5
    min_similarity: float = 0.6
    fuzzy: bool = False
    fuzzy_max_dist: int = 2
    seed: int = 0
    out_dir: Path | None = None
    label_predicates: tuple[str, ...] = (RDFS_LABEL,)
    surface_forms: Path | None = None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise UsageError("--lambda must lie in [0, 1]")
        if not 0.0 <= self.min_similarity <= 1.0:
            raise UsageError("--min-similarity must lie in [0, 1]")
        if self.fuzzy_max_dist < 0:
            raise UsageError("--fuzzy-max-dist must be non-negative")


def _existing(path: str | os.PathLike | None, what: str) -> Path:
    if path is None:
        raise UsageError(f"missing {what}")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} not found: {p}")
    return p


def _config(args: argparse.Namespace) -> CliConfig:
    try:
        weights = Weights(*args.weights) if getattr(args, "weights", None) else Weights()
    except ValueError as exc:
        raise UsageError(f"--weights: {exc}") from None
    graph = getattr(args, "graph", None) or os.environ.get(GRAPH_ENV)
    return CliConfig(
        graph_path=_existing(graph, "--graph") if hasattr(args, "graph") else None,
        stopword_path=_existing(args.stopwords, "--stopwords") if getattr(args, "stopwords", None) else None,
        weights=weights,
        lam=getattr(args, "lam", 0.5),
        min_similarity=getattr(args, "min_similarity", 0.6),
        fuzzy=getattr(args, "fuzzy", False),
        fuzzy_max_dist=getattr(args, "fuzzy_max_dist", 2),
        seed=getattr(args, "seed", 0),
        out_dir=Path(args.out) if getattr(args, "out", None) else None,
        label_predicates=tuple(getattr(args, "label_predicate", None) or (RDFS_LABEL,)),
        surface_forms=_existing(args.surface_forms, "--surface-forms")
        if getattr(args, "surface_forms", None)
        else None,
    )


def _annotator(cfg: CliConfig, fuzzy: bool | None = None) -> Annotator:
    graph = load_graph(read_ntriples(cfg.graph_path))
    extra = read_surface_tsv(cfg.surface_forms) if cfg.surface_forms else ()
    index = build_index(graph, cfg.label_predicates, extra)
    stop = load_stopwords(cfg.stopword_path) if cfg.stopword_path else default_stopwords()
    return Annotator(
        graph,
        index,
        cfg.weights,
        stop,
        fuzzy=cfg.fuzzy if fuzzy is None else fuzzy,
        fuzzy_max_dist=cfg.fuzzy_max_dist,
        label_predicates=cfg.label_predicates,
    )


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# --- subcommands ---------------------------------------------------------------


def cmd_annotate(args: argparse.Namespace) -> int:
    if (args.text is None) == (args.input is None):
        raise UsageError("give exactly one of --text or --input")
    cfg = _config(args)
    if args.input is not None:
        items = read_transcripts(_existing(args.input, "--input"))
    else:
        items = [("0", args.text)]
    annotator = _annotator(cfg)
    lines = [
        json.dumps(annotator.annotate(text).to_record(utt), ensure_ascii=False) + "\n" for utt, text in items
    ]
    _write(args.out, "".join(lines))
    return 0


def cmd_correct(args: argparse.Namespace) -> int:
    cfg = _config(args)
    nbest_path = _existing(args.nbest, "--nbest")
    annotator = _annotator(cfg, fuzzy=False)
    outputs, logs = [], []
    for nb in read_nbest(nbest_path):
        ranked = rescore(nb, annotator, cfg.lam, cfg.min_similarity)
        outputs.append(
            [
                Hypothesis(r.hypothesis.utt_id, k, r.hypothesis.asr_score, r.hypothesis.text)
                for k, r in enumerate(ranked, 1)
            ]
        )
        logs.append(corrections_log(nb.utt_id, ranked))
    write_nbest(args.out, outputs)
    dump_corrections_log(args.log or f"{args.out}.corrections.json", logs)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    refs = read_transcripts(_existing(args.ref, "--ref"))
    if args.vocab:
        vocab = {
            w
            for line in _existing(args.vocab, "--vocab").read_text(encoding="utf-8").split("\n")
            for w in tokenize(line)
        }
    else:
        vocab = {w for _, text in refs for w in tokenize(text)}
    explicit = (args.psub, args.pdel, args.pins)
    try:
        if any(p is not None for p in explicit):
            model = ErrorModel(*(p or 0.0 for p in explicit), frozenset(vocab), args.seed)
        elif args.wer is not None:
            model = ErrorModel.from_rate(args.wer, vocab, args.seed, calibrate=not args.no_calibrate)
        else:
            raise UsageError("give --wer or at least one of --psub/--pdel/--pins")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.n < 1:
        raise UsageError("--n must be at least 1")

    if args.n == 1:
        hyps = []
        for k, (utt, text) in enumerate(refs):
            toks = corrupt(tokenize(text), model.with_seed(derive_seed(args.seed, k)))
            hyps.append((utt, " ".join(toks)))
        write_transcripts(args.out, hyps)
    else:
        lists = [
            generate_nbest(tokenize(text), model.with_seed(derive_seed(args.seed, k)), args.n, utt).hypotheses
            for k, (utt, text) in enumerate(refs)
        ]
        write_nbest(args.out, lists)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    refs = read_transcripts(_existing(args.ref, "--ref"))
    hyps = read_transcripts(_existing(args.hyp, "--hyp"))
    _, ref_text, hyp_text = pair_transcripts(refs, hyps)
    annotator = _annotator(cfg, fuzzy=False)
    ref_ann = [annotator.annotate(t) for t in ref_text]
    hyp_ann = [annotator.annotate(t) for t in hyp_text]
    report = corpus_report(args.label, ref_text, hyp_text, annotator, ref_ann, hyp_ann)
    histograms = {
        "diff_hist": entity_diff_histogram(ref_ann, hyp_ann),
        "pertinence_hist": pertinence_stats(hyp_ann),
        "pertinence_hist_ref": pertinence_stats(ref_ann),
    }
    emit_report([report], histograms, args.out, svg=args.svg)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    from .synthetic import SyntheticConfig, make_corpus

    corpus = make_corpus(SyntheticConfig(n_entities=args.entities, n_sentences=args.sentences, seed=args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "graph.nt").write_text(serialize_ntriples(corpus.graph), encoding="utf-8")
    write_transcripts(out / "ref.txt", corpus.transcripts())
    (out / "vocab.txt").write_text("".join(w + "\n" for w in sorted(corpus.vocabulary)), encoding="utf-8")
    return 0


# --- parser ------------------------------------------------------------------------


def _graph_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help=f"N-Triples knowledge graph (default: ${GRAPH_ENV})")
    p.add_argument("--stopwords", help="stopword list, one word per line (default: bundled list)")
    p.add_argument(
        "--label-predicate",
        action="append",
        metavar="IRI",
        help="predicate whose literals are entity labels; repeatable (default: rdfs:label)",
    )
    p.add_argument("--surface-forms", metavar="TSV", help="extra 'surface<TAB>iri' forms")
    p.add_argument(
        "--weights",
        nargs=3,
        type=float,
        metavar=("PRIOR", "LIKELIHOOD", "CONTEXT"),
        help="log-linear weights of the three scores (default: 1 1 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speechlink", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="link sentences to graph entities (JSON lines out)")
    _graph_options(p)
    p.add_argument("--text", help="a single sentence")
    p.add_argument("--input", help="transcript file, 'uttId<TAB>text' per line")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--fuzzy", action="store_true", help="also spot and link near-miss spellings")
    p.add_argument("--fuzzy-max-dist", type=int, default=2, help="max character edits for --fuzzy (default: 2)")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("correct", help="repair and rerank an N-best file using the graph")
    _graph_options(p)
    p.add_argument("--nbest", required=True, help="'uttId<TAB>rank<TAB>asrScore<TAB>text' lines")
    p.add_argument("--out", required=True, help="reranked N-best file")
    p.add_argument("--log", help="corrections JSON (default: OUT.corrections.json)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="weight of the ASR score (default: 0.5)")
    p.add_argument(
        "--min-similarity", type=float, default=0.6, help="spelling similarity floor for corrections (default: 0.6)"
    )
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("simulate", help="corrupt reference transcripts with a seeded noisy channel")
    p.add_argument("--ref", required=True, help="reference transcript, 'uttId<TAB>text' per line")
    p.add_argument("--wer", type=float, help="target error rate in [0, 1], split evenly over sub/del/ins")
    p.add_argument("--psub", type=float, help="substitution probability (overrides --wer)")
    p.add_argument("--pdel", type=float, help="deletion probability (overrides --wer)")
    p.add_argument("--pins", type=float, help="insertion probability (overrides --wer)")
    p.add_argument(
        "--no-calibrate", action="store_true", help="use --wer / 3 per operation, without alignment correction"
    )
    p.add_argument("--n", type=int, default=1, help="hypotheses per utterance; >1 writes an N-best file")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default: 0)")
    p.add_argument("--vocab", help="recognizer vocabulary, whitespace separated (default: reference words)")
    p.add_argument("--out", required=True, help="output transcript or N-best file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="WER, entity counts and histograms for a ref/hyp pair")
    _graph_options(p)
    p.add_argument("--ref", required=True, help="reference transcript")
    p.add_argument("--hyp", required=True, help="hypothesis transcript")
    p.add_argument("--label", required=True, help="test set label for report.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also draw histograms as SVG")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="write a seeded synthetic graph, reference corpus and vocabulary")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--entities", type=int, default=50, help="number of entities (default: 50)")
    p.add_argument("--sentences", type=int, default=200, help="number of sentences (default: 200)")
    p.add_argument("--seed", type=int, default=20170801, help="generator seed")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"speechlink {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (NTriplesParseError, ValueError, OSError) as exc:
        print(f"speechlink {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
