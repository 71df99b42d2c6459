"""Shared toy data and session-scoped trained artifacts."""

import pytest

from kpf_adapter.data import CorpusDoc, TrainSample
from kpf_adapter.generator import FinetuneConfig, finetune_generator
from kpf_adapter.scorer import CrossTrainConfig, train_cross_encoder

TOPICS = [
    "neural network", "graph ranking", "topic model", "query rewriting",
    "text mining", "vector search", "entity linking", "corpus study",
    "image caption", "speech signal", "code review", "table lookup",
]
ALIEN = [
    "volcanic eruption", "opera singing", "glacier melt", "coral reef",
    "amber fossil", "tidal energy",
]


def toy_split_samples(kind: str, n: int = 32) -> list[TrainSample]:
    samples = []
    for i in range(n):
        t1 = TOPICS[i % len(TOPICS)]
        t2 = TOPICS[(i + 3) % len(TOPICS)]
        targets = (t1, t2) if kind == "present" else (ALIEN[i % len(ALIEN)], t2)
        samples.append(
            TrainSample(
                doc_id=f"{kind}-doc{i}",
                input_text=f"a study of {t1}. we analyse {t1} and {t2} in documents.",
                targets=targets,
                kind=kind,
            )
        )
    return samples


def toy_scorer_corpus(n_docs: int = 68):
    """Balanced labeled pool: one reference and one negative per document,
    negatives alternating between topic-word collisions and alien phrases."""
    docs, candidates = [], {}
    for i in range(n_docs):
        t = TOPICS[i % len(TOPICS)]
        if i % 2 == 0:
            negative = f"{t.split()[0]} {TOPICS[(i + 5) % len(TOPICS)].split()[1]}"
        else:
            negative = ALIEN[i % len(ALIEN)]
        doc = CorpusDoc(f"d{i}", f"about {t}", f"this paper studies {t} in detail", (t,))
        docs.append(doc)
        candidates[doc.doc_id] = [t, negative]
    return docs, candidates


TOY_GENERATOR_CONFIG = dict(epochs=3, learning_rate=1e-3, batch_size=8)
TOY_SCORER_CONFIG = CrossTrainConfig(
    learning_rate=2e-3, batch_size=4, epochs=3, negative_filtering=True
)
TOY_SCORER_SEED = 3


@pytest.fixture(scope="session")
def generator_artifacts(tmp_path_factory):
    """Train one tiny generator per kind, once per session."""
    root = tmp_path_factory.mktemp("generators")
    artifacts = {}
    for kind in ("present", "absent"):
        config = FinetuneConfig(kind=kind, **TOY_GENERATOR_CONFIG)
        artifacts[kind] = finetune_generator(
            toy_split_samples(kind), config, root / kind, seed=1
        )
    return artifacts


@pytest.fixture(scope="session")
def scorer_artifact(tmp_path_factory):
    docs, candidates = toy_scorer_corpus()
    train_docs = docs[:50]
    train_candidates = {d.doc_id: candidates[d.doc_id] for d in train_docs}
    out = tmp_path_factory.mktemp("scorer") / "cross"
    return train_cross_encoder(
        train_docs, train_candidates, TOY_SCORER_CONFIG, out, seed=TOY_SCORER_SEED
    )
