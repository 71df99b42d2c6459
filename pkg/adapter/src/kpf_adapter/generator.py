"""Finetuning and decoding of the per-kind sequence-to-sequence generators.

One generator is trained per keyphrase kind, on that kind's samples only;
the artifact directory carries a manifest recording exactly which samples
went in, so separation is auditable. The default base model is
"tiny-random": a small randomly initialized denoising seq2seq transformer
over a vocabulary built from the training data, which keeps the reference
adapter runnable offline. Any other identifier is handed to
transformers.from_pretrained together with its own tokenizer.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import fmean

import torch

from .data import TrainSample, fingerprint_samples, serialize_targets
from .vocab import BOS, EOS, PAD, Vocab, pad_batch

TINY_BASE = "tiny-random"


@dataclass(frozen=True)
class FinetuneConfig:
    kind: str
    epochs: int
    learning_rate: float = 1e-5
    batch_size: int = 12
    base_model: str = TINY_BASE
    max_input_tokens: int = 96
    max_target_tokens: int = 24

    def __post_init__(self):
        if self.kind not in ("present", "absent"):
            raise ValueError(f"kind must be 'present' or 'absent', got {self.kind!r}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")

    @classmethod
    def defaults_for(cls, kind: str) -> "FinetuneConfig":
        # absent generation converges slower and gets twice the epochs
        return cls(kind=kind, epochs=8 if kind == "absent" else 4)


def _tiny_bart_config(vocab_size: int):
    from transformers import BartConfig

    return BartConfig(
        vocab_size=vocab_size,
        d_model=64,
        encoder_layers=1,
        decoder_layers=1,
        encoder_attention_heads=2,
        decoder_attention_heads=2,
        encoder_ffn_dim=128,
        decoder_ffn_dim=128,
        max_position_embeddings=192,
        dropout=0.0,
        attention_dropout=0.0,
        activation_dropout=0.0,
        pad_token_id=PAD,
        bos_token_id=BOS,
        eos_token_id=EOS,
        decoder_start_token_id=BOS,
        forced_eos_token_id=None,
    )


class WordCodec:
    """Encoding through the data-derived word vocabulary."""

    name = "word-vocab"

    def __init__(self, vocab: Vocab, max_input_tokens: int, max_target_tokens: int):
        self.vocab = vocab
        self.max_input_tokens = max_input_tokens
        self.max_target_tokens = max_target_tokens

    def encode_inputs(self, texts: list[str]) -> tuple[torch.Tensor, torch.Tensor]:
        rows = [self.vocab.encode(t, self.max_input_tokens) for t in texts]
        ids, mask = pad_batch(rows)
        return torch.tensor(ids), torch.tensor(mask)

    def encode_labels(self, texts: list[str]) -> torch.Tensor:
        rows = [self.vocab.encode(t, self.max_target_tokens, add_bos=False) for t in texts]
        ids, _ = pad_batch(rows)
        labels = torch.tensor(ids)
        labels[labels == PAD] = -100
        return labels

    def decode(self, ids) -> str:
        return self.vocab.decode([int(i) for i in ids])

    def save(self, artifact_dir: Path) -> None:
        self.vocab.save(artifact_dir / "vocab.json")

    @classmethod
    def load(cls, artifact_dir: Path, config: FinetuneConfig) -> "WordCodec":
        return cls(
            Vocab.load(artifact_dir / "vocab.json"),
            config.max_input_tokens,
            config.max_target_tokens,
        )


class HFCodec:
    """Encoding through a pretrained model's own tokenizer."""

    name = "hf-tokenizer"

    def __init__(self, tokenizer, max_input_tokens: int, max_target_tokens: int):
        self.tokenizer = tokenizer
        self.max_input_tokens = max_input_tokens
        self.max_target_tokens = max_target_tokens

    def encode_inputs(self, texts):
        enc = self.tokenizer(
            texts, truncation=True, max_length=self.max_input_tokens,
            padding=True, return_tensors="pt",
        )
        return enc["input_ids"], enc["attention_mask"]

    def encode_labels(self, texts):
        enc = self.tokenizer(
            texts, truncation=True, max_length=self.max_target_tokens,
            padding=True, return_tensors="pt",
        )
        labels = enc["input_ids"].clone()
        labels[labels == self.tokenizer.pad_token_id] = -100
        return labels

    def decode(self, ids) -> str:
        return self.tokenizer.decode(ids, skip_special_tokens=True)

    def save(self, artifact_dir: Path) -> None:
        self.tokenizer.save_pretrained(artifact_dir / "tokenizer")

    @classmethod
    def load(cls, artifact_dir: Path, config: FinetuneConfig) -> "HFCodec":
        from transformers import AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(artifact_dir / "tokenizer")
        return cls(tokenizer, config.max_input_tokens, config.max_target_tokens)


def _build_model_and_codec(config: FinetuneConfig, samples: list[TrainSample]):
    if config.base_model == TINY_BASE:
        from transformers import BartForConditionalGeneration

        texts = [s.input_text for s in samples] + [serialize_targets(s.targets) for s in samples]
        vocab = Vocab.build(texts)
        model = BartForConditionalGeneration(_tiny_bart_config(len(vocab)))
        codec = WordCodec(vocab, config.max_input_tokens, config.max_target_tokens)
    else:
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        model = AutoModelForSeq2SeqLM.from_pretrained(config.base_model)
        tokenizer = AutoTokenizer.from_pretrained(config.base_model)
        codec = HFCodec(tokenizer, config.max_input_tokens, config.max_target_tokens)
    return model, codec


def finetune_generator(
    samples: list[TrainSample],
    config: FinetuneConfig,
    out_dir: str | Path,
    seed: int = 0,
) -> Path:
    """Train one generator on samples of one kind and save its artifact."""
    if not samples:
        raise ValueError("no training samples")
    mixed = sorted({s.kind for s in samples} - {config.kind})
    if mixed:
        raise ValueError(
            f"config is for kind {config.kind!r} but samples include {mixed}"
        )
    torch.manual_seed(seed)
    model, codec = _build_model_and_codec(config, samples)
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    order_rng = random.Random(seed)

    inputs = [s.input_text for s in samples]
    targets = [serialize_targets(s.targets) for s in samples]
    epoch_losses: list[float] = []
    model.train()
    for epoch in range(config.epochs):
        order = list(range(len(samples)))
        order_rng.shuffle(order)
        batch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            ids, mask = codec.encode_inputs([inputs[i] for i in batch])
            labels = codec.encode_labels([targets[i] for i in batch])
            loss = model(input_ids=ids, attention_mask=mask, labels=labels).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            batch_losses.append(float(loss.detach()))
        epoch_losses.append(fmean(batch_losses))
        print(
            f"[finetune {config.kind}] epoch {epoch + 1}/{config.epochs} "
            f"loss {epoch_losses[-1]:.4f}",
            file=sys.stderr,
        )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir / "model")
    codec.save(out_dir)
    manifest = {
        "artifact": "generator",
        "kind": config.kind,
        "config": asdict(config),
        "seed": seed,
        "codec": codec.name,
        "n_samples": len(samples),
        "samples": [[s.doc_id, s.kind] for s in samples],
        "data_fingerprint": fingerprint_samples(samples),
        "epoch_losses": epoch_losses,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False), encoding="utf-8"
    )
    return out_dir


class GeneratorBundle:
    def __init__(self, model, codec, manifest: dict):
        self.model = model
        self.codec = codec
        self.manifest = manifest
        self.kind = manifest["kind"]

    def generate_sequences(self, text: str, n: int = 5) -> list[str]:
        """Beam-search decode up to n target sequences for one input text."""
        ids, mask = self.codec.encode_inputs([text])
        self.model.eval()
        with torch.no_grad():
            out = self.model.generate(
                ids,
                attention_mask=mask,
                num_beams=n,
                num_return_sequences=n,
                max_new_tokens=self.codec.max_target_tokens,
                early_stopping=True,
                do_sample=False,
            )
        return [self.codec.decode(row) for row in out]


def load_generator(artifact_dir: str | Path) -> GeneratorBundle:
    from transformers import AutoModelForSeq2SeqLM

    artifact_dir = Path(artifact_dir)
    manifest = json.loads((artifact_dir / "manifest.json").read_text(encoding="utf-8"))
    if manifest.get("artifact") != "generator":
        raise ValueError(f"{artifact_dir} is not a generator artifact")
    config = FinetuneConfig(**manifest["config"])
    model = AutoModelForSeq2SeqLM.from_pretrained(artifact_dir / "model")
    codec_cls = WordCodec if manifest["codec"] == WordCodec.name else HFCodec
    codec = codec_cls.load(artifact_dir, config)
    return GeneratorBundle(model, codec, manifest)
