"""Tokenization: wordpunct splitting with punctuation-only tokens dropped."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Maximal runs of word characters, or of non-space non-word characters.
_WORDPUNCT = re.compile(r"\w+|[^\w\s]+")


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True


def tokenize(text: str, cfg: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Split text into word tokens.

    Runs the wordpunct rule, then drops every token that contains no
    alphanumeric character, so "don't" yields ["don", "t"] while "!" and
    "..." vanish. Empty or all-punctuation input yields an empty list.
    """
    tokens = [t for t in _WORDPUNCT.findall(text) if any(c.isalnum() for c in t)]
    if cfg.lowercase:
        tokens = [t.lower() for t in tokens]
    return tokens
