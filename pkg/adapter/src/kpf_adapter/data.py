"""Readers for the pipeline's documented file formats and data fingerprints.

The adapter deliberately depends only on the on-disk interfaces: corpus
files ({"id","title","abstract","keyphrases"} per line) and split files
({"id","input","targets","kind"} per line), plus the ' ; ' target-sequence
convention.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

TARGET_SEPARATOR = " ; "
KINDS = ("present", "absent")


@dataclass(frozen=True)
class TrainSample:
    doc_id: str
    input_text: str
    targets: tuple[str, ...]
    kind: str


@dataclass(frozen=True)
class CorpusDoc:
    doc_id: str
    title: str
    body: str
    keyphrases: tuple[str, ...]

    @property
    def text(self) -> str:
        return f"{self.title}. {self.body}"


def read_split_file(path: str | Path) -> list[TrainSample]:
    path = Path(path)
    samples = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                kind = obj["kind"]
                if kind not in KINDS:
                    raise ValueError(f"unknown kind {kind!r}")
                samples.append(
                    TrainSample(obj["id"], obj["input"], tuple(obj["targets"]), kind)
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad split record: {exc}") from None
    return samples


def read_corpus_file(path: str | Path) -> list[CorpusDoc]:
    path = Path(path)
    docs = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(
                    CorpusDoc(
                        obj["id"],
                        obj.get("title", ""),
                        obj.get("abstract", ""),
                        tuple(obj.get("keyphrases", [])),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad corpus record: {exc}") from None
    return docs


def read_candidates_file(path: str | Path) -> dict[str, list[str]]:
    """Candidate phrases per doc id, from the pipeline's candidates format."""
    path = Path(path)
    out: dict[str, list[str]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[obj["id"]] = [c["phrase"] for c in obj["candidates"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad candidates record: {exc}") from None
    return out


def serialize_targets(targets) -> str:
    return TARGET_SEPARATOR.join(targets)


def fingerprint_samples(samples: list[TrainSample]) -> str:
    canonical = json.dumps(
        [[s.doc_id, s.input_text, list(s.targets), s.kind] for s in samples],
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def fingerprint_pairs(pairs) -> str:
    canonical = json.dumps(sorted(pairs), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
