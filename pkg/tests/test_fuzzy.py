import random
import string

import pytest

from dupliq import fuzzy

from oracles import (
    indel_oracle,
    partial_oracle,
    token_set_oracle,
    token_sort_oracle,
)


def test_indel_examples():
    assert fuzzy.indel_ratio("abc", "abc") == 100
    assert fuzzy.indel_ratio("abc", "xyz") == 0
    assert fuzzy.indel_ratio("abcd", "abce") == 75
    assert fuzzy.indel_ratio("", "") == 100


def test_partial_examples():
    assert fuzzy.partial_ratio("abc", "zzabczz") == 100
    assert fuzzy.partial_ratio("abc", "abc") == 100
    assert fuzzy.partial_ratio("abx", "zzabczz") == 67
    assert fuzzy.partial_ratio("", "x") == 0
    assert fuzzy.partial_ratio("", "") == 100


def test_token_sort_examples():
    assert fuzzy.token_sort_ratio("world hello", "hello world") == 100
    # oracle value: sorted joins are "a b" vs "a b c", LCS 3 over lengths 3+5
    assert fuzzy.token_sort_ratio("a b", "b a c") == 75
    assert fuzzy.token_sort_ratio("", "") == 100


def test_token_set_examples():
    assert fuzzy.token_set_ratio("new york is big", "big new york") == 100
    for s in ["", "abc", "a b c", "What is AI?"]:
        assert fuzzy.token_set_ratio(s, s) == 100
    assert fuzzy.token_set_ratio("a", "b") == 0


def test_wratio_examples():
    assert fuzzy.wratio("abc", "abc") == 100
    assert fuzzy.wratio("a", "") == 0
    long_pair = ("what is ai", "what is ai really really really long tail")
    # long branch of the cascade: partial ratio is scaled by 0.9
    expected = fuzzy.indel_ratio("what is ai", "what is ai really really really long tail")
    ps = 0.9
    cascade = max(
        expected,
        ps * fuzzy.partial_ratio(*long_pair),
        0.9 * ps * fuzzy.token_sort_ratio(*long_pair, partial=True),
        0.9 * ps * fuzzy.token_set_ratio(*long_pair, partial=True),
    )
    assert fuzzy.wratio(*long_pair) == round(cascade)


def test_fuzzy_features_identical_and_disjoint():
    for q in ["", "what is ai", "How do I learn Python?"]:
        feats = fuzzy.fuzzy_features(q, q)
        assert all(v == 100 for v in vars(feats).values())
    feats = fuzzy.fuzzy_features("", "x")
    assert all(v == 0 for v in vars(feats).values())


GOLDEN_PAIR = ("How do I learn Python?", "How can I learn Python?")
# frozen from the DP/window oracle
GOLDEN_VALUES = {
    "qratio": 88,
    "wratio": 88,
    "partial_ratio": 86,
    "token_set_ratio": 92,
    "token_sort_ratio": 88,
    "partial_token_set_ratio": 100,
    "partial_token_sort_ratio": 90,
}


def test_fuzzy_features_golden():
    feats = fuzzy.fuzzy_features(*GOLDEN_PAIR)
    got = vars(feats)
    assert all(0 <= v <= 100 for v in got.values())
    assert got == GOLDEN_VALUES


def _random_pairs(count, max_len, seed):
    rng = random.Random(seed)
    alphabet = string.ascii_lowercase[:6] + " "
    for _ in range(count):
        s1 = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, max_len + 1)))
        s2 = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, max_len + 1)))
        yield s1, s2


def test_indel_matches_dp_oracle():
    for s1, s2 in _random_pairs(2000, 12, seed=2):
        assert fuzzy.indel_ratio(s1, s2) == indel_oracle(s1, s2), (s1, s2)


def test_partial_matches_window_oracle():
    for s1, s2 in _random_pairs(2000, 12, seed=3):
        assert fuzzy.partial_ratio(s1, s2) == partial_oracle(s1, s2), (s1, s2)


def test_token_ratios_match_oracle():
    for s1, s2 in _random_pairs(1500, 12, seed=4):
        for partial in (False, True):
            assert fuzzy.token_sort_ratio(s1, s2, partial) == token_sort_oracle(
                s1, s2, partial
            ), (s1, s2, partial)
            assert fuzzy.token_set_ratio(s1, s2, partial) == token_set_oracle(
                s1, s2, partial
            ), (s1, s2, partial)


def test_scores_in_range_and_symmetric():
    for s1, s2 in _random_pairs(400, 16, seed=5):
        feats1 = vars(fuzzy.fuzzy_features(s1, s2))
        feats2 = vars(fuzzy.fuzzy_features(s2, s1))
        assert all(0 <= v <= 100 for v in feats1.values())
        assert feats1 == feats2


def test_indel_identity_iff_equal_when_lengths_match():
    for s1, s2 in _random_pairs(500, 10, seed=6):
        if len(s1) == len(s2):
            assert (fuzzy.indel_ratio(s1, s2) == 100) == (s1 == s2)
        assert fuzzy.indel_ratio(s1, s1) == 100


def test_token_set_dominates_intersection_comparison():
    # token_set >= token_sort is NOT universal; what the three-way max does
    # guarantee is dominance over the intersection-first joined forms
    from dupliq.textops import normalize_text

    for s1, s2 in _random_pairs(500, 14, seed=7):
        set1 = set(normalize_text(s1).split())
        set2 = set(normalize_text(s2).split())
        if not set1 or not set2:
            continue
        t0 = " ".join(sorted(set1 & set2))
        t1 = (t0 + " " + " ".join(sorted(set1 - set2))).strip()
        t2 = (t0 + " " + " ".join(sorted(set2 - set1))).strip()
        assert fuzzy.token_set_ratio(s1, s2) >= fuzzy.indel_ratio(t1, t2)
