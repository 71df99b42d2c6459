"""Cross-encoder relevance scorer with negative filtering.

Candidate phrases are labeled 1 when they match a document's reference
keyphrases (exact word-token sequence, case-folded) and 0 otherwise; the
scorer reads the (document, phrase) pair jointly and outputs a confidence
in (0, 1]. With negative filtering on, negatives the current model already
scores below 0.5 are dropped from the next epoch's training set, so the
set shrinks monotonically while positives are never touched.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import fmean

import torch

from .data import CorpusDoc, fingerprint_pairs
from .vocab import BOS, EOS, PAD, SEP, Vocab, pad_batch, word_tokens

FILTER_THRESHOLD = 0.5  # the natural binary-classification decision boundary
SCORE_FLOOR = 1e-9


@dataclass(frozen=True)
class CrossTrainConfig:
    learning_rate: float = 5e-6
    batch_size: int = 24
    epochs: int = 3
    negative_filtering: bool = True
    max_doc_tokens: int = 96
    max_phrase_tokens: int = 16

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass(frozen=True)
class PairExample:
    doc_id: str
    doc_text: str
    phrase: str
    label: int


def _tiny_bert_config(vocab_size: int):
    from transformers import BertConfig

    return BertConfig(
        vocab_size=vocab_size,
        hidden_size=64,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=128,
        max_position_embeddings=192,
        hidden_dropout_prob=0.0,
        attention_probs_dropout_prob=0.0,
        num_labels=1,
        pad_token_id=PAD,
    )


def build_examples(docs: list[CorpusDoc], candidates: dict[str, list[str]]) -> list[PairExample]:
    """Label every candidate phrase against its document's references."""
    examples = []
    by_id = {d.doc_id: d for d in docs}
    for doc_id, phrases in candidates.items():
        doc = by_id.get(doc_id)
        if doc is None:
            raise ValueError(f"candidates refer to unknown doc id {doc_id!r}")
        ref_keys = {tuple(word_tokens(r)) for r in doc.keyphrases}
        seen = set()
        for phrase in phrases:
            key = tuple(word_tokens(phrase))
            if not key or key in seen:
                continue
            seen.add(key)
            examples.append(
                PairExample(doc_id, doc.text, phrase, int(key in ref_keys))
            )
    return examples


def _encode_pairs(vocab: Vocab, config: CrossTrainConfig, pairs) -> tuple[torch.Tensor, torch.Tensor]:
    rows = []
    for doc_text, phrase in pairs:
        doc_ids = vocab.encode(doc_text, config.max_doc_tokens, add_bos=False, add_eos=False)
        phrase_ids = vocab.encode(phrase, config.max_phrase_tokens, add_bos=False, add_eos=False)
        rows.append([BOS] + doc_ids + [SEP] + phrase_ids + [EOS])
    ids, mask = pad_batch(rows)
    return torch.tensor(ids), torch.tensor(mask)


def _scores(model, vocab: Vocab, config: CrossTrainConfig, pairs) -> list[float]:
    if not pairs:
        return []
    model.eval()
    with torch.no_grad():
        ids, mask = _encode_pairs(vocab, config, pairs)
        logits = model(input_ids=ids, attention_mask=mask).logits.squeeze(-1)
        probs = torch.sigmoid(logits)
    return [min(max(float(p), SCORE_FLOOR), 1.0) for p in probs]


def train_cross_encoder(
    docs: list[CorpusDoc],
    candidates: dict[str, list[str]],
    config: CrossTrainConfig,
    out_dir: str | Path,
    seed: int = 0,
) -> Path:
    """Train the scorer, applying negative filtering between epochs."""
    from transformers import BertForSequenceClassification

    examples = build_examples(docs, candidates)
    n_pos = sum(e.label for e in examples)
    if n_pos == 0:
        raise ValueError("training set has no positive (reference) phrases")
    if n_pos == len(examples):
        raise ValueError("training set has no negative (non-reference) phrases")

    torch.manual_seed(seed)
    vocab = Vocab.build([e.doc_text for e in examples] + [e.phrase for e in examples])
    model = BertForSequenceClassification(_tiny_bert_config(len(vocab)))
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    loss_fn = torch.nn.BCEWithLogitsLoss()
    order_rng = random.Random(seed)

    active = list(examples)
    history = []
    for epoch in range(config.epochs):
        order_rng.shuffle(active)
        model.train()
        batch_losses = []
        for start in range(0, len(active), config.batch_size):
            batch = active[start : start + config.batch_size]
            ids, mask = _encode_pairs(vocab, config, [(e.doc_text, e.phrase) for e in batch])
            labels = torch.tensor([float(e.label) for e in batch])
            logits = model(input_ids=ids, attention_mask=mask).logits.squeeze(-1)
            loss = loss_fn(logits, labels)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            batch_losses.append(float(loss.detach()))
        history.append(
            {
                "epoch": epoch + 1,
                "n_examples": len(active),
                "n_positives": sum(e.label for e in active),
                "mean_loss": fmean(batch_losses),
            }
        )
        print(
            f"[train-scorer] epoch {epoch + 1}/{config.epochs} "
            f"examples {len(active)} loss {history[-1]['mean_loss']:.4f}",
            file=sys.stderr,
        )
        if config.negative_filtering and epoch + 1 < config.epochs:
            negatives = [e for e in active if e.label == 0]
            scores = _scores(model, vocab, config, [(e.doc_text, e.phrase) for e in negatives])
            solved = {
                id(e) for e, s in zip(negatives, scores) if s < FILTER_THRESHOLD
            }
            active = [e for e in active if e.label == 1 or id(e) not in solved]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir / "model")
    vocab.save(out_dir / "vocab.json")
    manifest = {
        "artifact": "cross-encoder",
        "config": asdict(config),
        "seed": seed,
        "n_examples": len(examples),
        "n_positives": n_pos,
        "history": history,
        "data_fingerprint": fingerprint_pairs(
            [[e.doc_id, e.phrase, e.label] for e in examples]
        ),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False), encoding="utf-8"
    )
    return out_dir


class ScorerBundle:
    def __init__(self, model, vocab: Vocab, config: CrossTrainConfig, manifest: dict):
        self.model = model
        self.vocab = vocab
        self.config = config
        self.manifest = manifest

    def score(self, doc_text: str, phrases: list[str]) -> list[float]:
        return _scores(self.model, self.vocab, self.config, [(doc_text, p) for p in phrases])


def load_scorer(artifact_dir: str | Path) -> ScorerBundle:
    from transformers import BertForSequenceClassification

    artifact_dir = Path(artifact_dir)
    manifest = json.loads((artifact_dir / "manifest.json").read_text(encoding="utf-8"))
    if manifest.get("artifact") != "cross-encoder":
        raise ValueError(f"{artifact_dir} is not a cross-encoder artifact")
    config = CrossTrainConfig(**manifest["config"])
    model = BertForSequenceClassification.from_pretrained(artifact_dir / "model")
    vocab = Vocab.load(artifact_dir / "vocab.json")
    return ScorerBundle(model, vocab, config, manifest)
