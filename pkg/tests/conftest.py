"""Shared synthetic-data helpers for the test suite."""

import random

import pytest

from kpf.corpus import Dataset, Document
from kpf.textnorm import stem, tokenize

# Content vocabulary used to build synthetic documents. Every stem of these
# words is a stemming fixed point, which the textnorm tests assert.
VOCAB = """
graph ranking neural network language model topic cluster query rewriting
matrix factorization text summarization document retrieval feature selection
semantic matching keyword extraction attention mechanism sequence labeling
entity recognition knowledge inference sentence classification relevance
feedback corpus indexing vector alignment machine translation transformer
encoder benchmark evaluation method approach baseline system framework
pipeline experiment learning deep search index word phrase
""".split()

SUFFIXES = ["", "", "", "s", "ing", "ed"]


def random_words(rng: random.Random, n: int) -> list[str]:
    return [rng.choice(VOCAB) for _ in range(n)]


def random_document(rng: random.Random, doc_id: str, n_body: int = 30) -> Document:
    title = " ".join(random_words(rng, rng.randint(2, 5)))
    body = " ".join(random_words(rng, n_body))
    return Document(id=doc_id, title=title, body=body, ref_keyphrases=())


def inflect(rng: random.Random, word: str) -> str:
    return word + rng.choice(SUFFIXES)


def random_phrase(rng: random.Random, doc: Document) -> str:
    """A phrase engineered to stress the presence test from several angles."""
    tokens = tokenize(doc.title) + tokenize(doc.body)
    mode = rng.randrange(6)
    if mode == 0 and tokens:  # verbatim window: present
        n = rng.randint(1, min(3, len(tokens)))
        i = rng.randrange(len(tokens) - n + 1)
        return " ".join(tokens[i : i + n])
    if mode == 1 and tokens:  # inflected window: still present via stems
        n = rng.randint(1, min(3, len(tokens)))
        i = rng.randrange(len(tokens) - n + 1)
        return " ".join(inflect(rng, t) for t in tokens[i : i + n])
    if mode == 2 and len(tokens) >= 3:  # reversed window: order broken
        n = rng.randint(2, min(3, len(tokens)))
        i = rng.randrange(len(tokens) - n + 1)
        return " ".join(reversed(tokens[i : i + n]))
    if mode == 3 and len(tokens) >= 4:  # gapped subsequence: not contiguous
        i = rng.randrange(len(tokens) - 3)
        return f"{tokens[i]} {tokens[i + 2]}"
    if mode == 4:  # random vocabulary words: usually absent
        return " ".join(inflect(rng, w) for w in random_words(rng, rng.randint(1, 3)))
    return rng.choice(["", "  ", "!!", "out of vocabulary banana"])


def oracle_is_present(phrase: str, doc: Document) -> bool:
    """Independent brute-force window comparison over stem sequences."""
    phrase_stems = [stem(t) for t in tokenize(phrase)]
    doc_stems = [stem(t) for t in tokenize(doc.title)] + [
        stem(t) for t in tokenize(doc.body)
    ]
    if not phrase_stems:
        return False
    n = len(phrase_stems)
    for i in range(len(doc_stems) - n + 1):
        match = True
        for j in range(n):
            if doc_stems[i + j] != phrase_stems[j]:
                match = False
                break
        if match:
            return True
    return False


def synthetic_dataset(rng: random.Random, n_docs: int, name: str = "synthetic") -> Dataset:
    """Documents with reference phrases mixing present, absent, and duplicates."""
    documents = []
    for i in range(n_docs):
        doc = random_document(rng, f"doc-{i:05d}")
        refs = [random_phrase(rng, doc) for _ in range(rng.randint(0, 6))]
        if refs and rng.random() < 0.3:  # stem-duplicate of an earlier ref
            refs.append(inflect(rng, rng.choice(refs)) if rng.random() < 0.5 else rng.choice(refs))
        documents.append(
            Document(id=doc.id, title=doc.title, body=doc.body, ref_keyphrases=tuple(refs))
        )
    return Dataset(name=name, documents=documents)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)


def make_adapter(tmp_path, name: str, body: str) -> str:
    """Write a small adapter script and return the command that runs it."""
    import sys
    import textwrap

    script = tmp_path / f"{name}.py"
    script.write_text(textwrap.dedent(body), encoding="utf-8")
    return f"{sys.executable} {script}"


ECHO_ADAPTER = """
    import json
    import sys

    for line in sys.stdin:
        req = json.loads(line)
        response = {"id": req["id"], "candidates": [{"phrase": "x", "score": 1.0}]}
        print(json.dumps(response), flush=True)
"""
