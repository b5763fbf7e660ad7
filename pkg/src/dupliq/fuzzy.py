"""Fuzzy string-similarity scores built on a normalized indel core.

Every public score is an integer in [0, 100].  The core similarity of two
strings is ``100 * 2 * LCS(s1, s2) / (len(s1) + len(s2))`` where LCS is the
longest common subsequence over unicode scalars; rounding to integer is
half-away-from-zero and happens once per public operation.

Empty-string convention (applied uniformly): two empty inputs are a perfect
match (100), exactly one empty input is a total mismatch (0).

The LCS length itself is computed with the bit-parallel column algorithm,
which runs in O(len2) big-integer steps instead of the quadratic dynamic
program; the quadratic program is kept in the test suite as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .textops import normalize_text, tokenize

# Weighted-ratio cascade constants.
WRATIO_UNBASE_SCALE = 0.95
WRATIO_PARTIAL_SCALE = 0.9
WRATIO_LONG_PARTIAL_SCALE = 0.6
WRATIO_TRY_PARTIAL_RATIO = 1.5
WRATIO_LONG_RATIO = 8.0


def _round_score(x: float) -> int:
    # round half away from zero; scores are never negative
    return int(math.floor(x + 0.5))


def lcs_length(s1: str, s2: str) -> int:
    """Length of the longest common subsequence of two strings."""
    if not s1 or not s2:
        return 0
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    masks: dict[str, int] = {}
    for i, c in enumerate(s1):
        masks[c] = masks.get(c, 0) | (1 << i)
    width = (1 << len(s1)) - 1
    v = width
    for c in s2:
        m = masks.get(c)
        if m is None:
            continue
        u = v & m
        v = ((v + u) | (v - u)) & width
    return len(s1) - v.bit_count()


def _indel_fraction(s1: str, s2: str) -> float:
    total = len(s1) + len(s2)
    if total == 0:
        return 1.0
    return 2.0 * lcs_length(s1, s2) / total


def indel_ratio(s1: str, s2: str) -> int:
    """Normalized indel similarity of two raw strings, 0..100."""
    return _round_score(100.0 * _indel_fraction(s1, s2))


def _partial_fraction(s1: str, s2: str) -> float:
    a, b = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    if not a:
        return 1.0 if not b else 0.0
    best = 0.0
    for start in range(len(b) - len(a) + 1):
        window = b[start : start + len(a)]
        frac = _indel_fraction(a, window)
        if frac > best:
            best = frac
            if best == 1.0:
                break
    return best


def partial_ratio(s1: str, s2: str) -> int:
    """Best indel score of the shorter string against every equal-length
    window of the longer one."""
    return _round_score(100.0 * _partial_fraction(s1, s2))


def _sorted_join(s: str) -> str:
    return " ".join(sorted(tokenize(normalize_text(s))))


def token_sort_ratio(s1: str, s2: str, partial: bool = False) -> int:
    """Score after normalizing, sorting tokens alphabetically and rejoining."""
    t1 = _sorted_join(s1)
    t2 = _sorted_join(s2)
    if partial:
        return partial_ratio(t1, t2)
    return indel_ratio(t1, t2)


def token_set_ratio(s1: str, s2: str, partial: bool = False) -> int:
    """Three-way comparison of sorted intersection and sorted remainders."""
    set1 = set(tokenize(normalize_text(s1)))
    set2 = set(tokenize(normalize_text(s2)))
    if not set1 and not set2:
        return 100
    if not set1 or not set2:
        return 0
    inter = sorted(set1 & set2)
    rest1 = sorted(set1 - set2)
    rest2 = sorted(set2 - set1)
    t0 = " ".join(inter)
    t1 = (t0 + " " + " ".join(rest1)).strip()
    t2 = (t0 + " " + " ".join(rest2)).strip()
    score = _partial_fraction if partial else _indel_fraction
    best = max(score(t0, t1), score(t0, t2), score(t1, t2))
    return _round_score(100.0 * best)


def qratio(s1: str, s2: str) -> int:
    """Quick ratio: indel similarity of the normalized strings."""
    return indel_ratio(normalize_text(s1), normalize_text(s2))


def wratio(s1: str, s2: str) -> int:
    """Weighted ratio: the best of several scaled scores.

    On normalized strings: when the length ratio is below 1.5 the cascade
    compares the plain ratio against 0.95-scaled token sort/set ratios;
    otherwise it brings in the partial variants, scaled by 0.9 (0.6 when one
    string is more than 8x the other) and an extra 0.9 for the token forms.
    """
    n1 = normalize_text(s1)
    n2 = normalize_text(s2)
    if not n1 and not n2:
        return 100
    if not n1 or not n2:
        return 0
    base = float(indel_ratio(n1, n2))
    len_ratio = max(len(n1), len(n2)) / min(len(n1), len(n2))
    if len_ratio < WRATIO_TRY_PARTIAL_RATIO:
        best = max(
            base,
            WRATIO_UNBASE_SCALE * token_sort_ratio(n1, n2),
            WRATIO_UNBASE_SCALE * token_set_ratio(n1, n2),
        )
    else:
        ps = (
            WRATIO_LONG_PARTIAL_SCALE
            if len_ratio > WRATIO_LONG_RATIO
            else WRATIO_PARTIAL_SCALE
        )
        best = max(
            base,
            ps * partial_ratio(n1, n2),
            0.9 * ps * token_sort_ratio(n1, n2, partial=True),
            0.9 * ps * token_set_ratio(n1, n2, partial=True),
        )
    return _round_score(best)


@dataclass(frozen=True)
class FuzzyFeatures:
    qratio: int
    wratio: int
    partial_ratio: int
    token_set_ratio: int
    token_sort_ratio: int
    partial_token_set_ratio: int
    partial_token_sort_ratio: int


def fuzzy_features(q1: str, q2: str) -> FuzzyFeatures:
    """The seven fuzzy-match scores for a question pair."""
    return FuzzyFeatures(
        qratio=qratio(q1, q2),
        wratio=wratio(q1, q2),
        partial_ratio=partial_ratio(q1, q2),
        token_set_ratio=token_set_ratio(q1, q2),
        token_sort_ratio=token_sort_ratio(q1, q2),
        partial_token_set_ratio=token_set_ratio(q1, q2, partial=True),
        partial_token_sort_ratio=token_sort_ratio(q1, q2, partial=True),
    )
