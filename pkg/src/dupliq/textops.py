"""Text normalization, tokenization, stop words, and the basic pair features.

Conventions used throughout the feature pipeline:

* character lengths count every unicode scalar, whitespace included;
* ``nchar`` counts non-whitespace characters (the count of characters, not
  the cardinality of the character set);
* word counts come from raw whitespace splitting, so punctuation stays
  attached to words exactly as it does in the length statistics;
* common-word counts compare distinct lowercased raw tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

from .stopwords import ENGLISH_STOPWORDS


def normalize_text(text: str) -> str:
    """Lowercase, replace non-alphanumerics with spaces, collapse whitespace."""
    scrubbed = "".join(c if c.isalnum() else " " for c in text.lower())
    return " ".join(scrubbed.split())


def scrub_text(text: str) -> str:
    """Like :func:`normalize_text` but case-preserving.

    Used where token case matters for embedding lookup.
    """
    scrubbed = "".join(c if c.isalnum() else " " for c in text)
    return " ".join(scrubbed.split())


def tokenize(text: str) -> list[str]:
    """Split on whitespace; empty or blank input gives an empty list."""
    return text.split()


def remove_stopwords(tokens: list[str]) -> list[str]:
    """Drop tokens on the bundled English stop-word list, preserving order.

    Membership is tested on the lowercased token so case-preserving token
    streams are filtered consistently.
    """
    return [t for t in tokens if t.lower() not in ENGLISH_STOPWORDS]


@dataclass(frozen=True)
class BasicFeatures:
    len_q1: int
    len_q2: int
    len_diff: int
    nchar_q1: int
    nchar_q2: int
    nwords_q1: int
    nwords_q2: int
    common_words: int


def _nchar(text: str) -> int:
    return sum(1 for c in text if not c.isspace())


def basic_features(q1: str, q2: str) -> BasicFeatures:
    """Compute the eight length/word-count features for a question pair."""
    tokens1 = tokenize(q1)
    tokens2 = tokenize(q2)
    common = {t.lower() for t in tokens1} & {t.lower() for t in tokens2}
    return BasicFeatures(
        len_q1=len(q1),
        len_q2=len(q2),
        len_diff=len(q1) - len(q2),
        nchar_q1=_nchar(q1),
        nchar_q2=_nchar(q2),
        nwords_q1=len(tokens1),
        nwords_q2=len(tokens2),
        common_words=len(common),
    )
