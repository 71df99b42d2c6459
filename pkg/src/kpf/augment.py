"""Training-set expansion by shuffling keyphrase target lists.

Each sample gets up to `shuffles` permuted copies appended after the
originals. Permutations are drawn from a per-sample stream keyed by
(seed, doc_id, kind, round), so output does not depend on iteration or
scheduling order. A drawn permutation equal to any sequence already
emitted for the same (doc_id, kind) is discarded without resampling;
single-phrase samples therefore never gain copies, which keeps expansion
strictly below (shuffles + 1) x on realistic corpora.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, replace
from typing import NamedTuple

from .splitter import KeyphraseKind, SplitSample

__all__ = ["AugmentConfig", "ExpansionReport", "shuffle_expand", "expansion_report"]


@dataclass(frozen=True)
class AugmentConfig:
    shuffles: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.shuffles < 0:
            raise ValueError(f"shuffles must be >= 0, got {self.shuffles}")


class ExpansionReport(NamedTuple):
    n_before: int
    n_after: int
    ratio: float


def _sample_rng(seed: int, doc_id: str, kind: KeyphraseKind, round_no: int) -> random.Random:
    material = f"{seed}|{doc_id}|{kind.value}|{round_no}".encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def _fisher_yates(items: tuple[str, ...], rng: random.Random) -> tuple[str, ...]:
    perm = list(items)
    for i in range(len(perm) - 1, 0, -1):
        j = rng.randrange(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


def shuffle_expand(samples: list[SplitSample], config: AugmentConfig) -> list[SplitSample]:
    """Append deduplicated shuffled copies of each sample's phrase list."""
    out = list(samples)
    emitted: dict[tuple[str, KeyphraseKind], set[tuple[str, ...]]] = {}
    for s in samples:
        emitted.setdefault((s.doc_id, s.kind), set()).add(s.target_phrases)
    for s in samples:
        key = (s.doc_id, s.kind)
        for round_no in range(1, config.shuffles + 1):
            rng = _sample_rng(config.seed, s.doc_id, s.kind, round_no)
            perm = _fisher_yates(s.target_phrases, rng)
            if perm in emitted[key]:
                continue
            emitted[key].add(perm)
            out.append(replace(s, target_phrases=perm))
    return out


def expansion_report(before: list[SplitSample], after: list[SplitSample]) -> ExpansionReport:
    """Counts and expansion ratio; an empty input reports ratio 1.0."""
    n_before, n_after = len(before), len(after)
    ratio = n_after / n_before if n_before else 1.0
    return ExpansionReport(n_before, n_after, ratio)
