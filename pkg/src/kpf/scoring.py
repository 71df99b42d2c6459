"""Corpus TF-IDF statistics and log-linear fusion of model and TF-IDF scores.

Fixed conventions, chosen once so every run is comparable:
  idf(t)            = ln((N + 1) / (df(t) + 1)) + 1, df = 0 for unseen tokens
  tf(t, doc)        = count of t in the document stem sequence / total stems
  tfidf(phrase)     = mean over the phrase's stems of tf(t, doc) * idf(t)
  fused (present)   = alpha * ln(max(cross, eps)) + (1 - alpha) * ln(max(tfidf, eps))
  fused (absent)    = ln(max(cross, eps))        (TF-IDF does not apply)

The epsilon floor keeps every fused score finite; ranking breaks score ties
by the normalized phrase, ascending, so output order is reproducible.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import Dataset, Document
from .splitter import KeyphraseKind
from .textnorm import document_stems, stem_key

__all__ = [
    "IdfTable",
    "FusionConfig",
    "ScoredCandidate",
    "build_idf",
    "doc_term_stats",
    "tfidf_from_stats",
    "tfidf_phrase",
    "fuse",
    "rank",
    "write_idf",
    "read_idf",
]


@dataclass(frozen=True)
class IdfTable:
    doc_count: int
    df: dict[str, int]

    def __post_init__(self):
        if self.doc_count < 1:
            raise ValueError("IdfTable needs at least one document")
        for token, count in self.df.items():
            if not 1 <= count <= self.doc_count:
                raise ValueError(
                    f"df[{token!r}] = {count} outside [1, {self.doc_count}]"
                )

    def idf(self, token: str) -> float:
        return math.log((self.doc_count + 1) / (self.df.get(token, 0) + 1)) + 1.0


def build_idf(dataset: Dataset) -> IdfTable:
    """Count, per stemmed token, the documents containing it."""
    if len(dataset) == 0:
        raise ValueError(f"cannot build an IDF table from empty dataset {dataset.name!r}")
    df: Counter[str] = Counter()
    for doc in dataset:
        df.update(set(document_stems(doc.title, doc.body)))
    return IdfTable(doc_count=len(dataset), df=dict(df))


def doc_term_stats(doc: Document) -> tuple[Counter[str], int]:
    """Stem counts and total stem count of a document, computed once per doc."""
    stems = document_stems(doc.title, doc.body)
    return Counter(stems), len(stems)


def tfidf_from_stats(
    stems: tuple[str, ...], counts: Counter[str], total: int, idf: IdfTable
) -> float:
    """Mean tf*idf over the given stems against precomputed document stats."""
    if not stems or total == 0:
        return 0.0
    return sum(counts[s] / total * idf.idf(s) for s in stems) / len(stems)


def tfidf_phrase(phrase: str, doc: Document, idf: IdfTable) -> float:
    """TF-IDF score of one phrase against one document; 0 for empty phrases."""
    counts, total = doc_term_stats(doc)
    return tfidf_from_stats(stem_key(phrase), counts, total, idf)


@dataclass(frozen=True)
class FusionConfig:
    alpha: float = 0.7
    epsilon: float = 1e-9

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0,1], got {self.alpha}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class ScoredCandidate:
    phrase: str
    kind: KeyphraseKind
    cross_score: float
    tfidf_score: float = 0.0
    fused_log_score: float | None = None


def fuse(cross: float, tfidf: float, config: FusionConfig, kind: KeyphraseKind) -> float:
    """Log-linear fusion; the absent branch ignores the TF-IDF operand."""
    if cross < 0 or tfidf < 0:
        raise ValueError("scores must be non-negative")
    log_cross = math.log(max(cross, config.epsilon))
    if kind is KeyphraseKind.ABSENT:
        return log_cross
    # alpha weights are applied even when alpha is 0 or 1, which makes the
    # corresponding operand drop out exactly.
    log_tfidf = math.log(max(tfidf, config.epsilon))
    return config.alpha * log_cross + (1.0 - config.alpha) * log_tfidf


def _tiebreak(candidate: ScoredCandidate) -> tuple[str, str]:
    return (" ".join(stem_key(candidate.phrase)), candidate.phrase)


def rank(candidates: list[ScoredCandidate], config: FusionConfig) -> list[ScoredCandidate]:
    """Fill in fused scores and sort descending, ties by normalized phrase."""
    fused = [
        replace(c, fused_log_score=fuse(c.cross_score, c.tfidf_score, config, c.kind))
        for c in candidates
    ]
    return sorted(fused, key=lambda c: (-c.fused_log_score, *_tiebreak(c)))


def write_idf(table: IdfTable, path: str | Path) -> None:
    """Persist as a doc_count header line plus tab-separated (token, df) rows."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"doc_count\t{table.doc_count}\n")
        for token in sorted(table.df):
            fh.write(f"{token}\t{table.df[token]}\n")


def read_idf(path: str | Path) -> IdfTable:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"idf table not found: {path}")
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if len(header) != 2 or header[0] != "doc_count":
            raise ValueError(f"{path}:1: expected 'doc_count<TAB>N' header")
        doc_count = int(header[1])
        df: dict[str, int] = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'token<TAB>df'")
            df[parts[0]] = int(parts[1])
    return IdfTable(doc_count=doc_count, df=df)
