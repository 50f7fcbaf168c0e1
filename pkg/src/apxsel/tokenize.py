"""String tokenization: q-gram multisets, word tokens, per-word q-gram sets.

Padded q-gram tokenization replaces every whitespace run with q-1 pad
symbols and wraps the string in q-1 pad symbols on each side, so that word
boundaries are isolated and word order does not affect the q-gram set.
"""

from __future__ import annotations

import re
import warnings
from collections import Counter
from dataclasses import dataclass

_WS_RUN = re.compile(r"\s+")


class PadCollisionWarning(UserWarning):
    """Input string contains the pad symbol; grams may collide with padding."""


@dataclass(frozen=True)
class TokenizerConfig:
    q: int = 2
    padded: bool = True
    case_fold: bool = True
    pad_char: str = "$"

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if len(self.pad_char) != 1:
            raise ValueError("pad_char must be a single character")
        if self.pad_char.isspace():
            raise ValueError("pad_char must not be whitespace")


def _fold(s: str, cfg: TokenizerConfig) -> str:
    return s.upper() if cfg.case_fold else s


def _slide(s: str, q: int) -> Counter:
    grams = Counter()
    for i in range(len(s) - q + 1):
        grams[s[i : i + q]] += 1
    return grams


def qgram_tokenize(s: str, cfg: TokenizerConfig) -> Counter:
    """Multiset of q-grams of ``s`` as a Counter (token -> count).

    Unpadded mode slides a width-q window over the (optionally case-folded)
    string.  Padded mode first replaces each whitespace run with q-1 pad
    characters and adds q-1 pad characters at both ends.  The empty string
    yields an empty multiset in both modes (pure-padding grams would make
    all empty strings maximally similar).
    """
    if not cfg.padded:
        return _slide(_fold(s, cfg), cfg.q)
    if s == "":
        return Counter()
    if cfg.pad_char in s:
        warnings.warn(
            f"input contains pad character {cfg.pad_char!r}", PadCollisionWarning
        )
    pad = cfg.pad_char * (cfg.q - 1)
    body = _WS_RUN.sub(pad, _fold(s, cfg))
    return _slide(pad + body + pad, cfg.q)


def word_tokenize(s: str, cfg: TokenizerConfig | None = None) -> list[str]:
    """Whitespace-separated word tokens, order and duplicates preserved."""
    fold = cfg.case_fold if cfg is not None else True
    words = s.split()
    if fold:
        words = [w.upper() for w in words]
    return words


def word_qgrams(s: str, cfg: TokenizerConfig) -> set[tuple[str, str]]:
    """Distinct (word, q-gram) pairs, each word padded independently."""
    pairs = set()
    for word in word_tokenize(s, cfg):
        for gram in qgrams_of_word(word, cfg):
            pairs.add((word, gram))
    return pairs


def qgrams_of_word(word: str, cfg: TokenizerConfig) -> set[str]:
    """Distinct q-grams of a single (already folded) word."""
    if cfg.padded:
        if cfg.pad_char in word:
            warnings.warn(
                f"input contains pad character {cfg.pad_char!r}", PadCollisionWarning
            )
        pad = cfg.pad_char * (cfg.q - 1)
        word = pad + word + pad
    return set(word[i : i + cfg.q] for i in range(len(word) - cfg.q + 1))
