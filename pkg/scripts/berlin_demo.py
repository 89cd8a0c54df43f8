"""Annotate the Berlin sentence and repair a noisy 3-best list with the bundled graph."""

import json
from importlib import resources

from speechlink.annotator import Annotator
from speechlink.corrector import Hypothesis, NBestList, corrections_log, rescore
from speechlink.kg import load_graph, parse_ntriples
from speechlink.surface import build_index

NBEST = [
    "Barline is the capital of Germany",
    "Berlin is the kepital of Germany",
    "Barley is the capital of Germany",
]


def main() -> None:
    text = resources.files("speechlink.data").joinpath("fixture.nt").read_text("utf-8")
    graph = load_graph(parse_ntriples(text))
    annotator = Annotator(graph, build_index(graph))

    ann = annotator.annotate("Berlin is the capital of Germany")
    for m, link in ann.links:
        print(f"{m.surface:10s} -> {link.entity}  (final {link.final_score:.3f}, pertinence {link.topic_pertinence:.3f})")

    nb = NBestList("demo", tuple(Hypothesis("demo", k, -float(k), t) for k, t in enumerate(NBEST, 1)))
    ranked = rescore(nb, annotator)
    print()
    for k, r in enumerate(ranked, 1):
        print(f"{k}. [{r.combined_score:.3f}] {r.hypothesis.text}  (was #{r.hypothesis.rank})")
    print()
    print(json.dumps(corrections_log("demo", ranked)["hypotheses"][0], indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main()
