"""Acceptance gate: one test per exit criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -s` to see the PASS/FAIL lines.
"""

import functools
import math
import random
import time
from collections import Counter

import pytest

from kpf.augment import AugmentConfig, shuffle_expand
from kpf.cli import main
from kpf.data import mini_corpus_path
from kpf.evaluate import MatchConfig, f1_at_k, f1_at_m
from kpf.generate import AdapterError, run_adapter
from kpf.scoring import FusionConfig, ScoredCandidate, fuse, rank
from kpf.splitter import KeyphraseKind, classify_keyphrase, dedup_phrases, split_dataset, write_splits
from kpf.textnorm import stem_key

from conftest import (
    VOCAB,
    inflect,
    make_adapter,
    oracle_is_present,
    random_document,
    random_phrase,
    synthetic_dataset,
)
from test_evaluate import ref_dedup, ref_f1, ref_f1_at_m


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] {name}: FAIL")
                raise
            print(f"[acceptance] {name}: PASS")
            return result

        return wrapper

    return decorate


@criterion("splitter oracle equivalence (10,000 pairs, < 10 s)")
def test_splitter_oracle_equivalence():
    rng = random.Random(101)
    start = time.perf_counter()
    mismatches = 0
    for i in range(10_000):
        doc = random_document(rng, f"d{i}", n_body=rng.randint(5, 35))
        phrase = random_phrase(rng, doc)
        expected = (
            KeyphraseKind.PRESENT if oracle_is_present(phrase, doc) else KeyphraseKind.ABSENT
        )
        if classify_keyphrase(phrase, doc) is not expected:
            mismatches += 1
    elapsed = time.perf_counter() - start
    assert mismatches == 0
    assert elapsed < 10.0, f"took {elapsed:.1f}s"


@criterion("present/absent partition property (1,000 documents)")
def test_partition_property():
    rng = random.Random(202)
    dataset = synthetic_dataset(rng, 1000)
    present, absent = split_dataset(dataset)
    present_by_id = {s.doc_id: s for s in present}
    absent_by_id = {s.doc_id: s for s in absent}
    violations = 0
    for doc in dataset:
        p = present_by_id.get(doc.id)
        a = absent_by_id.get(doc.id)
        p_phrases = list(p.target_phrases) if p else []
        a_phrases = list(a.target_phrases) if a else []
        if sorted(p_phrases + a_phrases) != sorted(dedup_phrases(doc.ref_keyphrases)):
            violations += 1
        if {stem_key(x) for x in p_phrases} & {stem_key(x) for x in a_phrases}:
            violations += 1
    assert violations == 0


@criterion("augmentation properties (multiset, dedup, bound, determinism, sub-2x)")
def test_augmentation_properties(tmp_path):
    rng = random.Random(303)
    present, _ = split_dataset(synthetic_dataset(rng, 400))
    assert any(len(s.target_phrases) == 1 for s in present), "fixture needs single-phrase samples"
    for k in (1, 2):
        config = AugmentConfig(shuffles=k, seed=7)
        out = shuffle_expand(present, config)
        # size bound
        assert len(present) <= len(out) <= (k + 1) * len(present)
        # multiset preservation and per-(doc, kind) sequence dedup
        source = {(s.doc_id, s.kind): Counter(s.target_phrases) for s in present}
        seen = set()
        for s in out:
            assert Counter(s.target_phrases) == source[(s.doc_id, s.kind)]
            key = (s.doc_id, s.kind, s.target_phrases)
            assert key not in seen
            seen.add(key)
        # byte-identical re-run
        a, b = tmp_path / f"a{k}.split", tmp_path / f"b{k}.split"
        write_splits(out, a)
        write_splits(shuffle_expand(present, config), b)
        assert a.read_bytes() == b.read_bytes()
    # strict sub-doubling for one shuffle on data with single-phrase samples
    out1 = shuffle_expand(present, AugmentConfig(shuffles=1, seed=7))
    assert len(present) < len(out1) < 2 * len(present)


@criterion("metric oracle equivalence (1,000 pairs at 1e-12; worked case exact)")
def test_metric_oracle_equivalence():
    assert f1_at_k(["a", "b", "c", "d", "e"], ["a", "c", "f"], 5) == 0.5
    rng = random.Random(404)
    checked = 0
    while checked < 1000:
        pool = [inflect(rng, rng.choice(VOCAB)) for _ in range(12)]
        preds = [rng.choice(pool) for _ in range(rng.randint(0, 9))]
        refs = [rng.choice(pool) for _ in range(rng.randint(1, 6))]
        if not ref_dedup(refs):
            continue
        pad = rng.random() < 0.5
        k = rng.randint(1, 8)
        got_k = f1_at_k(preds, refs, k, MatchConfig(pad_at_k=pad))
        assert abs(got_k - ref_f1(preds, refs, k, pad)) <= 1e-12
        assert abs(f1_at_m(preds, refs) - ref_f1_at_m(preds, refs)) <= 1e-12
        checked += 1


@criterion("fusion conformance (exact values; scaling and alpha=1 invariance)")
def test_fusion_conformance():
    config = FusionConfig(alpha=0.7)
    assert abs(fuse(0.5, 0.5, config, KeyphraseKind.PRESENT) - math.log(0.5)) <= 1e-12
    expected = 0.7 * math.log(0.9) + 0.3 * math.log(0.1)
    assert abs(fuse(0.9, 0.1, config, KeyphraseKind.PRESENT) - expected) <= 1e-12

    rng = random.Random(505)
    for _ in range(1000):
        candidates = [
            ScoredCandidate(
                phrase=f"c{j}-{rng.randrange(10**9)}",
                kind=KeyphraseKind.PRESENT,
                cross_score=rng.uniform(1e-4, 1.0),
                tfidf_score=rng.uniform(1e-4, 10.0),
            )
            for j in range(rng.randint(2, 12))
        ]
        base_order = [c.phrase for c in rank(candidates, config)]
        scale = rng.choice([0.1, 0.5, 2.0, 10.0, 1000.0])
        scaled = [
            ScoredCandidate(c.phrase, c.kind, c.cross_score, c.tfidf_score * scale)
            for c in candidates
        ]
        assert [c.phrase for c in rank(scaled, config)] == base_order
        cross_order = [c.cross_score for c in rank(candidates, FusionConfig(alpha=1.0))]
        assert cross_order == sorted(cross_order, reverse=True)


@criterion("absent branch independent of TF-IDF")
def test_absent_branch_ignores_tfidf():
    config = FusionConfig(alpha=0.7)
    reference = fuse(0.9, 0.0, config, KeyphraseKind.ABSENT)
    for tfidf in (0.0, 1e-12, 1e-9, 1e-3, 0.5, 1.0, 42.0, 1e3, 1e6):
        assert fuse(0.9, tfidf, config, KeyphraseKind.ABSENT) == reference
    assert abs(reference - math.log(0.9)) <= 1e-12


@criterion("end-to-end determinism on the mini corpus (seed 7, < 5 s)")
def test_end_to_end_determinism(tmp_path, capsys):
    mini = mini_corpus_path()
    config = tmp_path / "mini.cfg"
    config.write_text(
        f"train = {mini}\ntest = {mini}\nshuffles = 1\n",
        encoding="utf-8",
    )
    start = time.perf_counter()
    trees = []
    for run in ("run1", "run2"):
        out_dir = tmp_path / run
        code = main(
            ["pipeline", "--config", str(config), "--seed", "7", "--out-dir", str(out_dir)]
        )
        assert code == 0
        trees.append(
            {
                str(p.relative_to(out_dir)): p.read_bytes()
                for p in sorted(out_dir.rglob("*"))
                if p.is_file()
            }
        )
    elapsed = time.perf_counter() - start
    assert trees[0] == trees[1]
    assert len(trees[0]) == 11
    assert elapsed < 5.0, f"took {elapsed:.1f}s"


@criterion("adapter protocol validation (bad score, unknown id, early exit)")
def test_adapter_protocol_validation(tmp_path, rng):
    from kpf.corpus import Dataset, Document

    docs = [Document(id=f"doc{i}", title=f"t {i}", body=f"b {i}") for i in range(3)]
    dataset = Dataset(name="adapters", documents=docs)

    scenarios = {
        "bad score": (
            """
            import json
            import sys

            for line in sys.stdin:
                req = json.loads(line)
                out = {"id": req["id"], "candidates": [{"phrase": "x", "score": 1.5}]}
                print(json.dumps(out), flush=True)
            """,
            r"score 1\.5 outside \(0, 1\]",
        ),
        "unknown id": (
            """
            import json
            import sys

            sys.stdin.readline()
            print(json.dumps({"id": "ghost-id", "candidates": []}), flush=True)
            """,
            r"unknown doc id 'ghost-id'",
        ),
        "early exit": (
            """
            import json
            import sys

            req = json.loads(sys.stdin.readline())
            out = {"id": req["id"], "candidates": [{"phrase": "x", "score": 1.0}]}
            print(json.dumps(out), flush=True)
            """,
            r"missing",
        ),
    }
    for name, (body, pattern) in scenarios.items():
        command = make_adapter(tmp_path, name.replace(" ", "_"), body)
        with pytest.raises(AdapterError, match=pattern) as exc_info:
            run_adapter(dataset, KeyphraseKind.PRESENT, command)
        # exactly the one specified error, not a cascade
        assert exc_info.value.__class__ is AdapterError
