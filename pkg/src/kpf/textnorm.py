"""Deterministic tokenization, case folding, and Porter stemming.

Every comparison in the pipeline (presence tests, deduplication, metric
matching) goes through this module, so all functions here are pure and
locale-independent.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

__all__ = [
    "NormPhrase",
    "tokenize",
    "normalize_phrase",
    "stem",
    "stem_key",
    "document_stems",
]

_SPLIT_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on maximal runs of non-alphanumeric characters.

    Accented Latin characters are ASCII-folded (NFKD, combining marks
    dropped) before splitting; anything else acts as a separator. Digits
    are kept, so "BERT4Rec v2" -> ["bert4rec", "v2"].
    """
    folded = unicodedata.normalize("NFKD", text.casefold()).casefold()
    stripped = "".join(c for c in folded if not unicodedata.combining(c))
    return [t for t in _SPLIT_RE.split(stripped) if t]


@dataclass(frozen=True)
class NormPhrase:
    """A phrase with its tokenized and stemmed forms.

    `stems` is the canonical identity used for presence tests and
    deduplication: two phrases are "the same keyphrase" iff their stem
    sequences are equal.
    """

    raw: str
    tokens: tuple[str, ...]
    stems: tuple[str, ...]

    def is_empty(self) -> bool:
        return not self.tokens


def normalize_phrase(raw: str) -> NormPhrase:
    """Tokenize and stem a raw phrase. Total: empty input gives an empty phrase."""
    tokens = tuple(tokenize(raw))
    return NormPhrase(raw=raw, tokens=tokens, stems=tuple(stem(t) for t in tokens))


def stem_key(raw: str) -> tuple[str, ...]:
    """Stem-sequence identity of a raw phrase; the universal dedup/match key."""
    return tuple(stem(t) for t in tokenize(raw))


def document_stems(title: str, body: str) -> list[str]:
    """Stem sequence of a document: title tokens followed by body tokens."""
    return [stem(t) for t in tokenize(title)] + [stem(t) for t in tokenize(body)]


# ---------------------------------------------------------------------------
# Porter stemmer (M.F. Porter, 1980), matching the widely distributed
# reference implementation: words of length <= 2 are left unchanged, and
# step 2 includes the reference's "bli" -> "ble" and "logi" -> "log" rules.
# Tokens may contain digits; digits are classified as consonants.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem_part: str) -> int:
    # Number of vowel->consonant transitions: the m in [C](VC)^m[V].
    m = 0
    prev_vowel = False
    for i in range(len(stem_part)):
        is_vowel = not _is_cons(stem_part, i)
        if prev_vowel and not is_vowel:
            m += 1
        prev_vowel = is_vowel
    return m


def _has_vowel(stem_part: str) -> bool:
    return any(not _is_cons(stem_part, i) for i in range(len(stem_part)))


def _ends_double_cons(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_cons(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    # consonant-vowel-consonant ending where the final consonant is not w/x/y.
    n = len(word)
    if n < 3:
        return False
    return (
        _is_cons(word, n - 3)
        and not _is_cons(word, n - 2)
        and _is_cons(word, n - 1)
        and word[-1] not in "wxy"
    )


def _step1a(w: str) -> str:
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ies"):
        return w[:-2]
    if w.endswith("ss"):
        return w
    if w.endswith("s"):
        return w[:-1]
    return w


def _step1b(w: str) -> str:
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            return w[:-1]
        return w
    if w.endswith("ed") and _has_vowel(w[:-2]):
        w = w[:-2]
    elif w.endswith("ing") and _has_vowel(w[:-3]):
        w = w[:-3]
    else:
        return w
    # post-adjustments after removing -ed / -ing
    if w.endswith(("at", "bl", "iz")):
        return w + "e"
    if _ends_double_cons(w) and w[-1] not in "lsz":
        return w[:-1]
    if _measure(w) == 1 and _ends_cvc(w):
        return w + "e"
    return w


def _step1c(w: str) -> str:
    if w.endswith("y") and _has_vowel(w[:-1]):
        return w[:-1] + "i"
    return w


# (suffix, replacement) pairs; within each step the first suffix that
# matches wins and the scan stops, whether or not its m-condition holds.
# Longer suffixes precede any suffix of theirs ("ational" before "tional",
# "ization" before "ation").
_STEP2_RULES = (
    ("ational", "ate"),
    ("tional", "tion"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("izer", "ize"),
    ("bli", "ble"),
    ("alli", "al"),
    ("entli", "ent"),
    ("eli", "e"),
    ("ousli", "ous"),
    ("ization", "ize"),
    ("ation", "ate"),
    ("ator", "ate"),
    ("alism", "al"),
    ("iveness", "ive"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("aliti", "al"),
    ("iviti", "ive"),
    ("biliti", "ble"),
    ("logi", "log"),
)

_STEP3_RULES = (
    ("icate", "ic"),
    ("ative", ""),
    ("alize", "al"),
    ("iciti", "ic"),
    ("ical", "ic"),
    ("ful", ""),
    ("ness", ""),
)

_STEP4_SUFFIXES = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant",
    "ement", "ment", "ent", "ion", "ou", "ism", "ate", "iti",
    "ous", "ive", "ize",
)


def _apply_rules(w: str, rules: tuple[tuple[str, str], ...], min_measure: int) -> str:
    for suffix, repl in rules:
        if w.endswith(suffix):
            stem_part = w[: -len(suffix)]
            if _measure(stem_part) > min_measure:
                return stem_part + repl
            return w
    return w


def _step4(w: str) -> str:
    for suffix in _STEP4_SUFFIXES:
        if w.endswith(suffix):
            stem_part = w[: -len(suffix)]
            if suffix == "ion" and not stem_part.endswith(("s", "t")):
                continue  # -ion strips only after s/t; nothing else ends in n
            if _measure(stem_part) > 1:
                return stem_part
            return w
    return w


def _step5(w: str) -> str:
    if w.endswith("e"):
        stem_part = w[:-1]
        m = _measure(stem_part)
        if m > 1 or (m == 1 and not _ends_cvc(stem_part)):
            w = stem_part
    if _measure(w) > 1 and _ends_double_cons(w) and w.endswith("l"):
        w = w[:-1]
    return w


def stem(token: str) -> str:
    """Porter-stem one lowercase token. Tokens of length <= 2 are unchanged."""
    if len(token) <= 2:
        return token
    w = _step1a(token)
    w = _step1b(w)
    w = _step1c(w)
    w = _apply_rules(w, _STEP2_RULES, 0)
    w = _apply_rules(w, _STEP3_RULES, 0)
    w = _step4(w)
    w = _step5(w)
    return w
