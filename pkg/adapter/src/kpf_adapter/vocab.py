"""Word-level vocabulary shared by the toy generator and scorer models.

Built from the training texts themselves so the adapter runs with no
pretrained checkpoint or tokenizer downloads. The ';' target separator is
its own token; ids 0..4 are reserved specials.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

PAD, BOS, EOS, UNK, SEP = 0, 1, 2, 3, 4
_SPECIALS = ["<pad>", "<s>", "</s>", "<unk>", "<sep>"]

_TOKEN_RE = re.compile(r"[0-9a-z]+|;")


def word_tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class Vocab:
    def __init__(self, tokens: list[str]):
        self.tokens = list(_SPECIALS) + list(tokens)
        self.token_to_id = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def build(cls, texts) -> "Vocab":
        seen = set()
        for text in texts:
            seen.update(word_tokens(text))
        return cls(sorted(seen))

    def encode(self, text: str, max_tokens: int, add_bos: bool = True, add_eos: bool = True) -> list[int]:
        ids = [self.token_to_id.get(t, UNK) for t in word_tokens(text)][:max_tokens]
        if add_bos:
            ids = [BOS] + ids
        if add_eos:
            ids = ids + [EOS]
        return ids

    def decode(self, ids) -> str:
        words = [
            self.tokens[i]
            for i in ids
            if 0 <= i < len(self.tokens) and i not in (PAD, BOS, EOS, UNK, SEP)
        ]
        return " ".join(words)

    def save(self, path: str | Path) -> None:
        payload = {"tokens": self.tokens[len(_SPECIALS) :]}
        Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(payload["tokens"])


def pad_batch(sequences: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Right-pad to a rectangle; returns (ids, attention_mask)."""
    width = max(len(s) for s in sequences)
    ids = [s + [PAD] * (width - len(s)) for s in sequences]
    mask = [[1] * len(s) + [0] * (width - len(s)) for s in sequences]
    return ids, mask
