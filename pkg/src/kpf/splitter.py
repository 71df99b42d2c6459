"""Present/absent keyphrase classification and training-set splitting.

A keyphrase is present when its stemmed token sequence occurs contiguously,
in order, inside the stemmed token sequence of title followed by body;
otherwise it is absent. Each document contributes at most one training
sample per kind, carrying all of its phrases of that kind in corpus order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import Dataset, Document
from .textnorm import document_stems, stem_key

__all__ = [
    "KeyphraseKind",
    "SplitSample",
    "classify_keyphrase",
    "split_dataset",
    "serialize_target",
    "write_splits",
    "read_splits",
    "TARGET_SEPARATOR",
]

TARGET_SEPARATOR = " ; "


class KeyphraseKind(str, Enum):
    PRESENT = "present"
    ABSENT = "absent"


@dataclass(frozen=True)
class SplitSample:
    doc_id: str
    input_text: str
    target_phrases: tuple[str, ...]
    kind: KeyphraseKind

    def __post_init__(self):
        if not self.target_phrases:
            raise ValueError(f"sample {self.doc_id!r}: target_phrases must be non-empty")


def _occurs_contiguously(needle: tuple[str, ...], hay: list[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(hay):
        return False
    first = needle[0]
    for i in range(len(hay) - n + 1):
        if hay[i] == first and tuple(hay[i : i + n]) == needle:
            return True
    return False


def classify_keyphrase(phrase: str, doc: Document) -> KeyphraseKind:
    """Classify one phrase against one document.

    Phrases that normalize to nothing are absent by definition.
    """
    needle = stem_key(phrase)
    if not needle:
        return KeyphraseKind.ABSENT
    hay = document_stems(doc.title, doc.body)
    if _occurs_contiguously(needle, hay):
        return KeyphraseKind.PRESENT
    return KeyphraseKind.ABSENT


def dedup_phrases(phrases) -> list[str]:
    """Drop phrases whose stem sequence was already seen, keeping first occurrences."""
    seen: set[tuple[str, ...]] = set()
    out: list[str] = []
    for p in phrases:
        key = stem_key(p)
        if key in seen:
            continue
        seen.add(key)
        out.append(p)
    return out


def model_input_text(doc: Document) -> str:
    """The text a generator sees for a document: title, separator, body."""
    return f"{doc.title}. {doc.body}"


def split_dataset(dataset: Dataset) -> tuple[list[SplitSample], list[SplitSample]]:
    """Partition each document's deduplicated keyphrases into present and
    absent samples. Documents with no phrase of a kind produce no sample of
    that kind; output preserves corpus order.
    """
    present: list[SplitSample] = []
    absent: list[SplitSample] = []
    for doc in dataset:
        hay = document_stems(doc.title, doc.body)
        present_phrases: list[str] = []
        absent_phrases: list[str] = []
        for phrase in dedup_phrases(doc.ref_keyphrases):
            needle = stem_key(phrase)
            if needle and _occurs_contiguously(needle, hay):
                present_phrases.append(phrase)
            else:
                absent_phrases.append(phrase)
        text = model_input_text(doc)
        if present_phrases:
            present.append(
                SplitSample(doc.id, text, tuple(present_phrases), KeyphraseKind.PRESENT)
            )
        if absent_phrases:
            absent.append(
                SplitSample(doc.id, text, tuple(absent_phrases), KeyphraseKind.ABSENT)
            )
    return present, absent


def serialize_target(phrases) -> str:
    """Join phrases into one target sequence; parse_generated_sequence inverts it."""
    phrases = list(phrases)
    if not phrases:
        raise ValueError("cannot serialize an empty phrase list")
    for p in phrases:
        if ";" in p:
            raise ValueError(f"phrase {p!r} contains the target separator ';'")
    return TARGET_SEPARATOR.join(phrases)


def write_splits(samples, path: str | Path) -> None:
    """Write samples as line-delimited JSON with keys id/input/targets/kind."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for s in samples:
            record = {
                "id": s.doc_id,
                "input": s.input_text,
                "targets": list(s.target_phrases),
                "kind": s.kind.value,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_splits(path: str | Path) -> list[SplitSample]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"split file not found: {path}")
    samples: list[SplitSample] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                samples.append(
                    SplitSample(
                        doc_id=obj["id"],
                        input_text=obj["input"],
                        target_phrases=tuple(obj["targets"]),
                        kind=KeyphraseKind(obj["kind"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad split record: {exc}") from None
    return samples
