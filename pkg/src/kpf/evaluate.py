"""Macro-averaged F1@5 and F1@M over stem-matched keyphrases.

Matching is on Porter-stemmed token sequences; both prediction and
reference lists are deduplicated before counting, so repeating a phrase can
never help a score. F1@k truncates the prediction list to its top k
entries; by default short lists are not padded (precision divides by what
was actually predicted), with the padding convention available behind
MatchConfig.pad_at_k for comparability with harnesses that use it. F1@M
scores the full prediction list. Per-document scores are averaged
unweighted over the documents that have at least one reference of the
evaluated kind.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

from .corpus import Dataset
from .splitter import KeyphraseKind, classify_keyphrase, dedup_phrases
from .textnorm import stem_key

__all__ = [
    "MatchConfig",
    "MetricReport",
    "match_hits",
    "f1_at_k",
    "f1_at_m",
    "evaluate_dataset",
    "render_report",
    "write_records",
    "read_records",
]


@dataclass(frozen=True)
class MatchConfig:
    pad_at_k: bool = False  # affects F1@k only, never F1@M


@dataclass(frozen=True)
class MetricReport:
    dataset_name: str
    kind: KeyphraseKind
    f1_at_5: float
    f1_at_m: float
    n_docs_evaluated: int


def _dedup_keys(phrases) -> list[tuple[str, ...]]:
    # phrases that normalize to no tokens are not keyphrases; drop them here
    seen: set[tuple[str, ...]] = set()
    keys: list[tuple[str, ...]] = []
    for p in phrases:
        key = stem_key(p)
        if key and key not in seen:
            seen.add(key)
            keys.append(key)
    return keys


def match_hits(preds, refs) -> int:
    """Stem-set intersection size after deduplicating both sides."""
    return len(set(_dedup_keys(preds)) & set(_dedup_keys(refs)))


def f1_at_k(preds, refs, k: int, cfg: MatchConfig = MatchConfig()) -> float:
    """F1 of the top-k predictions against the references."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ref_keys = set(_dedup_keys(refs))
    if not ref_keys:
        raise ValueError("refs must be non-empty after deduplication")
    preds = list(preds)
    taken_keys = _dedup_keys(preds[: min(k, len(preds))])
    hits = len(set(taken_keys) & ref_keys)
    if cfg.pad_at_k:
        precision = hits / k
    else:
        precision = hits / len(taken_keys) if taken_keys else 0.0
    recall = hits / len(ref_keys)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def f1_at_m(preds, refs) -> float:
    """F1 over everything the model produced; empty predictions score 0."""
    preds = list(preds)
    if not preds:
        return 0.0
    return f1_at_k(preds, refs, k=len(preds), cfg=MatchConfig(pad_at_k=False))


def evaluate_dataset(
    predictions: dict[str, list[str]],
    dataset: Dataset,
    kind: KeyphraseKind,
    cfg: MatchConfig = MatchConfig(),
) -> MetricReport:
    """Macro-average F1@5/F1@M for one keyphrase kind over a dataset.

    References are deduplicated and filtered to `kind` per document;
    documents with no reference of that kind are skipped. Documents with no
    prediction entry are scored against an empty list.
    """
    f5_sum = 0.0
    fm_sum = 0.0
    n_docs = 0
    for doc in dataset:
        refs = [
            p
            for p in dedup_phrases(doc.ref_keyphrases)
            if stem_key(p) and classify_keyphrase(p, doc) is kind
        ]
        if not refs:
            continue
        preds = predictions.get(doc.id, [])
        f5_sum += f1_at_k(preds, refs, k=5, cfg=cfg)
        fm_sum += f1_at_m(preds, refs)
        n_docs += 1
    if n_docs == 0:
        warnings.warn(
            f"no documents in {dataset.name!r} have {kind.value} references; "
            "scores reported as 0",
            stacklevel=2,
        )
        return MetricReport(dataset.name, kind, 0.0, 0.0, 0)
    return MetricReport(dataset.name, kind, f5_sum / n_docs, fm_sum / n_docs, n_docs)


# ---------------------------------------------------------------------------
# Report formatting and persistence
# ---------------------------------------------------------------------------


def render_report(entries: list[tuple[str, MetricReport]]) -> str:
    """Aligned text tables (one per kind): rows are configuration labels,
    columns are F1@5 / F1@M per dataset, values as score x 100, one decimal.
    """
    datasets: list[str] = []
    labels: list[str] = []
    cells: dict[tuple[str, KeyphraseKind, str], MetricReport] = {}
    for label, report in entries:
        if report.dataset_name not in datasets:
            datasets.append(report.dataset_name)
        if label not in labels:
            labels.append(label)
        cells[(label, report.kind, report.dataset_name)] = report

    label_width = max([len("model")] + [len(lab) for lab in labels])
    col_width = max([6] + [len(ds) for ds in datasets])
    lines: list[str] = []
    for kind in (KeyphraseKind.PRESENT, KeyphraseKind.ABSENT):
        if not any(key[1] is kind for key in cells):
            continue
        lines.append(f"{kind.value.capitalize()} keyphrases (F1 x 100)")
        header = "model".ljust(label_width)
        subheader = " " * label_width
        for ds in datasets:
            header += "  " + ds.center(2 * col_width + 2)
            subheader += "  " + "F1@5".rjust(col_width) + "  " + "F1@M".rjust(col_width)
        lines.append(header.rstrip())
        lines.append(subheader.rstrip())
        for label in labels:
            row = label.ljust(label_width)
            for ds in datasets:
                report = cells.get((label, kind, ds))
                if report is None:
                    row += "  " + "-".rjust(col_width) + "  " + "-".rjust(col_width)
                else:
                    row += (
                        "  "
                        + f"{report.f1_at_5 * 100:.1f}".rjust(col_width)
                        + "  "
                        + f"{report.f1_at_m * 100:.1f}".rjust(col_width)
                    )
            lines.append(row.rstrip())
        lines.append("")
    return "\n".join(lines)


def write_records(entries: list[tuple[str, MetricReport]], path: str | Path) -> None:
    """Machine-readable companion to the text report, one JSON record per line."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for label, r in entries:
            record = {
                "label": label,
                "dataset": r.dataset_name,
                "kind": r.kind.value,
                "f1_at_5": r.f1_at_5,
                "f1_at_m": r.f1_at_m,
                "n_docs_evaluated": r.n_docs_evaluated,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_records(path: str | Path) -> list[tuple[str, MetricReport]]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"records file not found: {path}")
    entries: list[tuple[str, MetricReport]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entries.append(
                    (
                        obj["label"],
                        MetricReport(
                            dataset_name=obj["dataset"],
                            kind=KeyphraseKind(obj["kind"]),
                            f1_at_5=float(obj["f1_at_5"]),
                            f1_at_m=float(obj["f1_at_m"]),
                            n_docs_evaluated=int(obj["n_docs_evaluated"]),
                        ),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad report record: {exc}") from None
    return entries
