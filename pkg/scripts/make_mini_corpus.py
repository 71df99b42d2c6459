#!/usr/bin/env python3
"""Regenerate the bundled synthetic mini corpus (src/kpf/data/mini.jsonl).

Fifty documents over a small IR/NLP vocabulary. Present references appear
verbatim (sometimes pluralized, to exercise stemmed matching) in the title
or body; absent references draw on a disjoint vocabulary so they can never
match document text. Deterministic: fixed seed, stable iteration order.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "kpf" / "data" / "mini.jsonl"

PRESENT_TOPICS = [
    "graph ranking", "neural network", "language model", "topic cluster",
    "query rewriting", "matrix factorization", "text summarization",
    "document retrieval", "feature selection", "semantic matching",
    "keyword extraction", "attention mechanism", "sequence labeling",
    "entity recognition", "knowledge inference", "sentence classification",
    "relevance feedback", "corpus indexing", "vector alignment",
    "machine translation",
]

SINGLE_TOPICS = ["transformer", "encoder", "benchmark", "retrieval", "attention"]

ABSENT_PHRASES = [
    "ontology curation", "genome assembly", "protein folding", "galaxy survey",
    "volcanic eruption", "monetary policy", "coral reef", "glacier melt",
    "opera singing", "medieval folklore", "urban farming", "solar sail",
    "amber fossil", "tidal energy", "desert irrigation",
]

FILLERS = [
    "method", "approach", "baseline", "dataset", "evaluation", "analysis",
    "system", "framework", "pipeline", "experiment",
]


def pluralize(phrase: str) -> str:
    head = phrase.split()
    head[-1] = head[-1] + "s"
    return " ".join(head)


def main() -> None:
    rng = random.Random(20240801)
    records = []
    for i in range(50):
        topics = rng.sample(PRESENT_TOPICS, 3)
        filler = rng.choice(FILLERS)
        title = f"{topics[0].title()} for {filler.title()} Design"
        body = (
            f"We study {topics[0]} and {topics[1]} over large corpora. "
            f"Our {topics[0]} {filler} improves a strong {topics[2]} baseline, "
            f"and the {topics[0]} component is the main driver. "
            f"Experiments confirm that {topics[1]} helps {topics[2]} as well."
        )
        refs = []
        # present references, occasionally pluralized so only stems match
        refs.append(pluralize(topics[0]) if rng.random() < 0.4 else topics[0])
        if rng.random() < 0.8:
            refs.append(topics[1])
        if rng.random() < 0.5:
            single = rng.choice(SINGLE_TOPICS)
            body += f" We provide a {single} suite."
            refs.append(single)
        # absent references (skipped for some docs)
        if rng.random() < 0.85:
            refs.extend(rng.sample(ABSENT_PHRASES, rng.randint(1, 2)))
        rng.shuffle(refs)
        if i == 17:  # one document with no references at all
            refs = []
        if i == 23:  # one single-phrase document
            refs = [topics[0]]
        records.append(
            {"id": f"mini-{i:03d}", "title": title, "abstract": body, "keyphrases": refs}
        )
    with OUT.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {len(records)} documents to {OUT}")


if __name__ == "__main__":
    main()
