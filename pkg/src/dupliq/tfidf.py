"""Word- and character-level TF-IDF vectorization and pair vectors.

Terms are word n-grams over normalized text (word analyzer) or raw
lowercased character n-grams including spaces (char analyzer).  Document
frequency is counted once per document, idf(t) = ln((1+N)/(1+df(t))) + 1,
and transformed vectors are L2-normalized raw counts times idf.  The
vocabulary cap keeps the highest-df terms, ties broken lexicographically.

A fitted model is expected to be trained on the deduplicated union of the
training split's question texts; that preparation is the caller's job
(see :func:`fit_corpus`).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

FORMAT_VERSION = 1


@dataclass
class SparseVec:
    dim: int
    indices: np.ndarray  # strictly increasing int positions
    values: np.ndarray  # nonzero floats aligned with indices

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


@dataclass
class TfidfModel:
    analyzer: str  # "word" or "char"
    ngram_range: tuple[int, int]
    max_features: int | None
    vocabulary: dict[str, int]
    idf: np.ndarray  # aligned with vocabulary's column indices

    @property
    def dim(self) -> int:
        return len(self.vocabulary)


def _word_terms(text: str, lo: int, hi: int) -> list[str]:
    from .textops import normalize_text, tokenize

    tokens = tokenize(normalize_text(text))
    terms = []
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            terms.append(" ".join(tokens[i : i + n]))
    return terms


def _char_terms(text: str, lo: int, hi: int) -> list[str]:
    text = text.lower()
    terms = []
    for n in range(lo, hi + 1):
        for i in range(len(text) - n + 1):
            terms.append(text[i : i + n])
    return terms


def analyze(text: str, analyzer: str, ngram_range: tuple[int, int]) -> list[str]:
    lo, hi = ngram_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad ngram_range {ngram_range}")
    if analyzer == "word":
        return _word_terms(text, lo, hi)
    if analyzer == "char":
        return _char_terms(text, lo, hi)
    raise ValueError(f"unknown analyzer {analyzer!r}")


def fit_corpus(question1: list[str], question2: list[str]) -> list[str]:
    """Deduplicated union of the two question columns, order of first use."""
    seen = dict.fromkeys(question1)
    seen.update(dict.fromkeys(question2))
    return list(seen)


def fit(
    corpus: list[str],
    analyzer: str = "char",
    ngram_range: tuple[int, int] = (1, 3),
    max_features: int | None = 50000,
) -> TfidfModel:
    """Learn vocabulary and idf weights from a corpus of documents."""
    if not corpus:
        raise ValueError("empty corpus")
    df: Counter = Counter()
    for doc in corpus:
        df.update(set(analyze(doc, analyzer, ngram_range)))
    terms = sorted(df)
    if max_features is not None and len(terms) > max_features:
        terms = sorted(terms, key=lambda t: (-df[t], t))[:max_features]
        terms = sorted(terms)
    n_docs = len(corpus)
    vocabulary = {t: i for i, t in enumerate(terms)}
    idf = np.array(
        [math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in terms], dtype=np.float64
    )
    return TfidfModel(
        analyzer=analyzer,
        ngram_range=(int(ngram_range[0]), int(ngram_range[1])),
        max_features=max_features,
        vocabulary=vocabulary,
        idf=idf,
    )


def transform(model: TfidfModel, text: str) -> SparseVec:
    """Text to an L2-normalized tf-idf vector; unknown terms are ignored."""
    counts: Counter = Counter(analyze(text, model.analyzer, model.ngram_range))
    indices = []
    values = []
    for term, count in counts.items():
        col = model.vocabulary.get(term)
        if col is not None:
            indices.append(col)
            values.append(count * model.idf[col])
    if not indices:
        return SparseVec(model.dim, np.empty(0, dtype=np.int64), np.empty(0))
    order = np.argsort(indices)
    idx = np.asarray(indices, dtype=np.int64)[order]
    val = np.asarray(values, dtype=np.float64)[order]
    val /= np.linalg.norm(val)
    return SparseVec(model.dim, idx, val)


def pair_vector(model: TfidfModel, q1: str, q2: str) -> SparseVec:
    """Concatenate the two question vectors into one of width 2 * dim."""
    v1 = transform(model, q1)
    v2 = transform(model, q2)
    return SparseVec(
        dim=2 * model.dim,
        indices=np.concatenate([v1.indices, v2.indices + model.dim]),
        values=np.concatenate([v1.values, v2.values]),
    )


def stack(vectors: list[SparseVec]) -> sp.csr_matrix:
    """Stack sparse vectors into a CSR matrix for the classifiers."""
    if not vectors:
        raise ValueError("no vectors to stack")
    dim = vectors[0].dim
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        if v.dim != dim:
            raise ValueError("inconsistent vector widths")
        indptr[i + 1] = indptr[i] + len(v.indices)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else []
    data = np.concatenate([v.values for v in vectors]) if vectors else []
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def save_model(model: TfidfModel, path: str | Path) -> None:
    terms = sorted(model.vocabulary.items(), key=lambda kv: kv[1])
    doc = {
        "format_version": FORMAT_VERSION,
        "analyzer": model.analyzer,
        "ngram_range": list(model.ngram_range),
        "max_features": model.max_features,
        "terms": [[t, i, float(model.idf[i])] for t, i in terms],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, sort_keys=True)


def load_model(path: str | Path) -> TfidfModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version")
    vocabulary = {t: int(i) for t, i, _ in doc["terms"]}
    idf = np.zeros(len(vocabulary))
    for _, i, w in doc["terms"]:
        idf[int(i)] = w
    return TfidfModel(
        analyzer=doc["analyzer"],
        ngram_range=tuple(doc["ngram_range"]),
        max_features=doc["max_features"],
        vocabulary=vocabulary,
        idf=idf,
    )
