"""Cross-encoder training, labeling, and negative filtering."""

import json

import pytest

from kpf_adapter.data import CorpusDoc
from kpf_adapter.scorer import (
    CrossTrainConfig,
    build_examples,
    load_scorer,
    train_cross_encoder,
)

from conftest import toy_scorer_corpus


def read_manifest(artifact_dir):
    return json.loads((artifact_dir / "manifest.json").read_text(encoding="utf-8"))


class TestCrossTrainConfig:
    def test_full_scale_defaults(self):
        config = CrossTrainConfig()
        assert config.learning_rate == 5e-6
        assert config.batch_size == 24
        assert config.epochs == 3
        assert config.negative_filtering is True


class TestBuildExamples:
    def test_reference_phrases_labeled_one(self):
        doc = CorpusDoc("d1", "about graphs", "graph text", ("graph ranking",))
        examples = build_examples([doc], {"d1": ["graph ranking", "opera singing"]})
        labels = {e.phrase: e.label for e in examples}
        assert labels == {"graph ranking": 1, "opera singing": 0}

    def test_label_matching_is_case_and_punctuation_insensitive(self):
        doc = CorpusDoc("d1", "t", "b", ("Neural Networks",))
        examples = build_examples([doc], {"d1": ["neural networks!"]})
        assert examples[0].label == 1

    def test_duplicate_candidates_dropped(self):
        doc = CorpusDoc("d1", "t", "b", ("x",))
        examples = build_examples([doc], {"d1": ["x", "X", "y"]})
        assert len(examples) == 2

    def test_unknown_doc_id_rejected(self):
        with pytest.raises(ValueError, match="ghost"):
            build_examples([], {"ghost": ["x"]})


class TestTrainCrossEncoder:
    def test_rejects_all_positive(self, tmp_path):
        doc = CorpusDoc("d1", "t", "body", ("x", "y"))
        with pytest.raises(ValueError, match="no negative"):
            train_cross_encoder(
                [doc], {"d1": ["x", "y"]}, CrossTrainConfig(epochs=1), tmp_path / "s"
            )

    def test_rejects_all_negative(self, tmp_path):
        doc = CorpusDoc("d1", "t", "body", ())
        with pytest.raises(ValueError, match="no positive"):
            train_cross_encoder(
                [doc], {"d1": ["x", "y"]}, CrossTrainConfig(epochs=1), tmp_path / "s"
            )

    def test_filtering_monotone_and_positives_constant(self, scorer_artifact):
        history = read_manifest(scorer_artifact)["history"]
        sizes = [h["n_examples"] for h in history]
        positives = [h["n_positives"] for h in history]
        assert sizes == sorted(sizes, reverse=True)
        assert len(set(positives)) == 1
        assert sizes[-1] < sizes[0]  # this run does filter some negatives

    def test_filtering_off_keeps_sizes_constant(self, tmp_path):
        docs, candidates = toy_scorer_corpus(16)
        config = CrossTrainConfig(
            learning_rate=1e-3, batch_size=8, epochs=2, negative_filtering=False
        )
        out = train_cross_encoder(
            docs, {d.doc_id: candidates[d.doc_id] for d in docs}, config, tmp_path / "s"
        )
        sizes = [h["n_examples"] for h in read_manifest(out)["history"]]
        assert len(set(sizes)) == 1

    def test_scores_in_unit_interval(self, scorer_artifact):
        bundle = load_scorer(scorer_artifact)
        scores = bundle.score(
            "about neural network. this paper studies neural network in detail",
            ["neural network", "volcanic eruption", "zzz unseen phrase"],
        )
        assert all(0.0 < s <= 1.0 for s in scores)

    def test_determinism_replay(self, tmp_path):
        docs, candidates = toy_scorer_corpus(16)
        cand_map = {d.doc_id: candidates[d.doc_id] for d in docs}
        config = CrossTrainConfig(learning_rate=1e-3, batch_size=8, epochs=2)
        a = train_cross_encoder(docs, cand_map, config, tmp_path / "a", seed=4)
        b = train_cross_encoder(docs, cand_map, config, tmp_path / "b", seed=4)
        assert read_manifest(a)["history"] == read_manifest(b)["history"]
