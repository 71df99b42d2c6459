"""Corpus records and line-delimited JSON persistence.

A corpus file is UTF-8 with one JSON object per line carrying the keys
"id", "title", "abstract" (mapped to Document.body), and "keyphrases".
Unknown keys are ignored; missing title/abstract default to "" and
missing keyphrases to []. Write then load is an exact round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["CorpusError", "Document", "Dataset", "load_corpus", "write_corpus"]


class CorpusError(ValueError):
    """Raised for unreadable, malformed, or invariant-violating corpus data."""


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    body: str
    ref_keyphrases: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if not self.title and not self.body:
            raise CorpusError(f"document {self.id!r}: title and body are both empty")


@dataclass
class Dataset:
    """An ordered, immutable-after-load collection of documents."""

    name: str
    documents: list[Document] = field(default_factory=list)

    def __post_init__(self):
        seen: dict[str, int] = {}
        for i, doc in enumerate(self.documents):
            if doc.id in seen:
                raise CorpusError(
                    f"duplicate document id {doc.id!r} (documents {seen[doc.id]} and {i})"
                )
            seen[doc.id] = i

    def __iter__(self):
        return iter(self.documents)

    def __len__(self):
        return len(self.documents)

    def by_id(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise KeyError(doc_id)


def _parse_record(obj: object, path: Path, lineno: int) -> Document:
    if not isinstance(obj, dict):
        raise CorpusError(f"{path}:{lineno}: record is not an object")
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError(f"{path}:{lineno}: missing or invalid 'id'")
    title = obj.get("title", "")
    body = obj.get("abstract", "")
    phrases = obj.get("keyphrases", [])
    if not isinstance(title, str) or not isinstance(body, str):
        raise CorpusError(f"{path}:{lineno}: 'title' and 'abstract' must be strings")
    if not isinstance(phrases, list) or not all(isinstance(p, str) for p in phrases):
        raise CorpusError(f"{path}:{lineno}: 'keyphrases' must be a list of strings")
    try:
        return Document(id=doc_id, title=title, body=body, ref_keyphrases=tuple(phrases))
    except CorpusError as exc:
        raise CorpusError(f"{path}:{lineno}: {exc}") from None


def load_corpus(path: str | Path, name: str | None = None) -> Dataset:
    """Load a corpus file, one document per line, in file order."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"corpus file not found: {path}")
    documents: list[Document] = []
    line_of_id: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON record: {exc.msg}") from None
            doc = _parse_record(obj, path, lineno)
            if doc.id in line_of_id:
                raise CorpusError(
                    f"{path}:{lineno}: duplicate id {doc.id!r} "
                    f"(first seen on line {line_of_id[doc.id]})"
                )
            line_of_id[doc.id] = lineno
            documents.append(doc)
    return Dataset(name=name if name is not None else path.stem, documents=documents)


def write_corpus(dataset: Dataset, path: str | Path) -> None:
    """Write a corpus file that load_corpus reproduces field-for-field."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in dataset:
            record = {
                "id": doc.id,
                "title": doc.title,
                "abstract": doc.body,
                "keyphrases": list(doc.ref_keyphrases),
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
