"""Pluggable generator boundary.

Neural generators live in external processes speaking a line-delimited JSON
protocol: one request per line on the adapter's stdin with keys
{"id", "text", "kind"}, one response per line on its stdout with keys
{"id", "candidates": [{"phrase", "score"}]}, flushed per response. Scores
must lie in (0, 1]; stderr passes through for logs; EOF on stdin means
shutdown. A deterministic extractive baseline is included so the whole
pipeline runs without any neural component.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import threading
from dataclasses import dataclass

from .corpus import Dataset, Document
from .scoring import IdfTable, doc_term_stats, tfidf_from_stats
from .splitter import KeyphraseKind, model_input_text
from .textnorm import stem, stem_key, tokenize

__all__ = [
    "AdapterError",
    "GenRequest",
    "GenResponse",
    "run_adapter",
    "parse_generated_sequence",
    "baseline_extract",
    "STOPWORDS",
]

# Candidate n-grams may not start or end with one of these function words.
STOPWORDS = frozenset(
    """
    a about after all an and any are as at be been but by can did do does
    for from had has have if in into is it its no nor not of on or such
    than that the their then there these they this to was we were what
    when which will with
    """.split()
)

_MAX_NGRAM = 4


class AdapterError(RuntimeError):
    """Protocol violation or failure of an external generator process."""


@dataclass(frozen=True)
class GenRequest:
    doc_id: str
    text: str
    kind: KeyphraseKind


@dataclass(frozen=True)
class GenResponse:
    doc_id: str
    candidates: tuple[tuple[str, float], ...]  # (phrase, cross score), ranked


def parse_generated_sequence(raw: str) -> list[str]:
    """Split a generated target sequence on ';' into clean, deduplicated phrases."""
    seen: set[tuple[str, ...]] = set()
    phrases: list[str] = []
    for part in raw.split(";"):
        phrase = part.strip()
        if not phrase:
            continue
        key = stem_key(phrase)
        if key in seen:
            continue
        seen.add(key)
        phrases.append(phrase)
    return phrases


def _validate_response(obj: object, expected: dict[str, None], answered: set[str]) -> GenResponse:
    if not isinstance(obj, dict):
        raise AdapterError("adapter response is not an object")
    doc_id = obj.get("id")
    if not isinstance(doc_id, str):
        raise AdapterError("adapter response is missing a string 'id'")
    if doc_id not in expected:
        raise AdapterError(f"adapter answered unknown doc id {doc_id!r}")
    if doc_id in answered:
        raise AdapterError(f"adapter answered doc id {doc_id!r} twice")
    raw_candidates = obj.get("candidates")
    if not isinstance(raw_candidates, list):
        raise AdapterError(f"doc {doc_id!r}: 'candidates' must be a list")
    seen: set[tuple[str, ...]] = set()
    candidates: list[tuple[str, float]] = []
    for entry in raw_candidates:
        if not isinstance(entry, dict) or "phrase" not in entry or "score" not in entry:
            raise AdapterError(f"doc {doc_id!r}: candidate entries need 'phrase' and 'score'")
        phrase, score = entry["phrase"], entry["score"]
        if not isinstance(phrase, str) or not isinstance(score, (int, float)):
            raise AdapterError(f"doc {doc_id!r}: bad candidate types")
        if not 0.0 < float(score) <= 1.0:
            raise AdapterError(f"doc {doc_id!r}: score {score} outside (0, 1]")
        key = stem_key(phrase)
        if key in seen:
            continue
        seen.add(key)
        candidates.append((phrase, float(score)))
    return GenResponse(doc_id=doc_id, candidates=tuple(candidates))


def run_adapter(dataset: Dataset, kind: KeyphraseKind, adapter_command: str) -> dict[str, GenResponse]:
    """Send one request per document to an adapter process and collect responses.

    Requests are written and responses read concurrently so arbitrarily
    large corpora cannot deadlock the pipes. The returned map is keyed and
    ordered by corpus order regardless of response order.
    """
    requests = [GenRequest(doc.id, model_input_text(doc), kind) for doc in dataset]
    expected = {r.doc_id: None for r in requests}
    proc = subprocess.Popen(
        shlex.split(adapter_command),
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        encoding="utf-8",
    )

    def feed() -> None:
        try:
            for req in requests:
                line = json.dumps(
                    {"id": req.doc_id, "text": req.text, "kind": req.kind.value},
                    ensure_ascii=False,
                )
                proc.stdin.write(line + "\n")
                proc.stdin.flush()
            proc.stdin.close()
        except (BrokenPipeError, OSError):
            pass  # adapter died; the reader side reports the real error

    writer = threading.Thread(target=feed, daemon=True)
    writer.start()

    answered: set[str] = set()
    responses: dict[str, GenResponse] = {}
    returncode = 0
    try:
        for line in proc.stdout:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AdapterError(f"unparseable adapter response: {exc.msg}") from None
            response = _validate_response(obj, expected, answered)
            answered.add(response.doc_id)
            responses[response.doc_id] = response
            if len(answered) == len(requests):
                break
    except AdapterError:
        proc.kill()
        raise
    finally:
        writer.join(timeout=10)
        proc.stdout.close()
        try:
            returncode = proc.wait(timeout=60)
        except subprocess.TimeoutExpired:
            proc.kill()
            returncode = proc.wait()

    if returncode != 0:
        raise AdapterError(f"adapter exited with code {returncode}")
    missing = [doc_id for doc_id in expected if doc_id not in answered]
    if missing:
        raise AdapterError(
            f"adapter closed its output with {len(missing)} response(s) missing, "
            f"first missing doc id {missing[0]!r}"
        )
    return {doc_id: responses[doc_id] for doc_id in expected}


def baseline_extract(doc: Document, idf: IdfTable, k: int) -> GenResponse:
    """Extractive TF-IDF baseline: top-k document n-grams as candidates.

    Enumerates contiguous 1..4-grams of title followed by body, skipping
    ones that start or end with a stopword, deduplicates by stem sequence,
    scores by mean tf*idf, and rank-normalizes confidences to (0, 1] as
    (k - rank_index) / k. May return fewer than k candidates.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    tokens = tokenize(doc.title) + tokenize(doc.body)
    counts, total = doc_term_stats(doc)
    seen: set[tuple[str, ...]] = set()
    scored: list[tuple[float, str, str]] = []  # (score, stem string, phrase)
    for i in range(len(tokens)):
        for n in range(1, _MAX_NGRAM + 1):
            if i + n > len(tokens):
                break
            gram = tokens[i : i + n]
            if gram[0] in STOPWORDS or gram[-1] in STOPWORDS:
                continue
            stems = tuple(stem(t) for t in gram)
            if stems in seen:
                continue
            seen.add(stems)
            score = tfidf_from_stats(stems, counts, total, idf)
            scored.append((score, " ".join(stems), " ".join(gram)))
    scored.sort(key=lambda item: (-item[0], item[1], item[2]))
    top = scored[:k]
    candidates = tuple(
        (phrase, (k - index) / k) for index, (_, _, phrase) in enumerate(top)
    )
    return GenResponse(doc_id=doc.id, candidates=candidates)
