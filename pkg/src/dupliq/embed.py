"""Pre-trained word vectors and the embedding-based pair features.

Covers loading GloVe text and word2vec binary files (gzip handled
transparently for both), mean sentence vectors, the word-mover transport
distance, seven vector distances, and component skewness/kurtosis.

Degenerate inputs are imputed so the downstream feature matrix stays
finite: a transport distance with an empty side is ``WMD_EMPTY_SENTINEL``,
cosine with exactly one zero vector is 1 (0 when both are zero), a
zero-denominator Bray-Curtis is 0, and the moments of a constant vector
are (0, 0).
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .textops import remove_stopwords, scrub_text, tokenize

WMD_EMPTY_SENTINEL = 1.0

DISTANCE_METRICS = (
    "cosine",
    "cityblock",
    "canberra",
    "euclidean",
    "minkowski3",
    "braycurtis",
    "jaccard",
)


@dataclass
class EmbeddingTable:
    dim: int
    vocab: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.vocab)

    def lookup(self, token: str) -> np.ndarray | None:
        """Exact-match lookup, falling back to the lowercased token."""
        vec = self.vocab.get(token)
        if vec is None:
            vec = self.vocab.get(token.lower())
        return vec


def _open_maybe_gzip(path: str | Path, mode: str):
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, mode)
    return open(path, mode)


def load_glove_text(path: str | Path, vocab_filter: set[str] | None = None) -> EmbeddingTable:
    """Load a GloVe text file: one ``word v1 ... vdim`` line per word.

    ``vocab_filter`` keeps only the listed words (dimension checking still
    covers every line); it keeps memory proportional to the corpus instead
    of the embedding file.
    """
    vocab: dict[str, np.ndarray] = {}
    dim = None
    with _open_maybe_gzip(path, "rt") as fh:
        for line_num, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if parts == [""]:
                continue
            if dim is None:
                dim = len(parts) - 1
                if dim < 1:
                    raise ValueError(f"{path} line {line_num}: no vector components")
            if len(parts) - 1 != dim:
                raise ValueError(
                    f"{path} line {line_num}: expected {dim} components, "
                    f"found {len(parts) - 1}"
                )
            if vocab_filter is not None and parts[0] not in vocab_filter:
                continue
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path} line {line_num}: {exc}") from None
            vocab[parts[0]] = vec
    if dim is None:
        raise ValueError(f"{path}: empty embedding file")
    return EmbeddingTable(dim=dim, vocab=vocab)


def read_word2vec_header(path: str | Path) -> tuple[int, int]:
    """Read just the (vocab_size, dim) header of a word2vec binary file."""
    with _open_maybe_gzip(path, "rb") as fh:
        return _parse_w2v_header(fh, path)


def _parse_w2v_header(fh, path) -> tuple[int, int]:
    header = b""
    while not header.endswith(b"\n"):
        ch = fh.read(1)
        if not ch:
            raise ValueError(f"{path}: missing header line")
        header += ch
        if len(header) > 128:
            raise ValueError(f"{path}: header line too long to be valid")
    try:
        vocab_size, dim = (int(x) for x in header.split())
    except ValueError:
        raise ValueError(f"{path}: unparsable header {header!r}") from None
    return vocab_size, dim


def load_word2vec_binary(
    path: str | Path,
    max_words: int | None = None,
    vocab_filter: set[str] | None = None,
) -> EmbeddingTable:
    """Load a word2vec binary file: ASCII ``vocab_size dim`` header, then per
    word the utf-8 bytes terminated by a space followed by dim little-endian
    float32 values.  Newlines between records are tolerated.

    ``max_words`` stops after that many records; ``vocab_filter`` stores
    only the listed words while still scanning the full file.
    """
    vocab: dict[str, np.ndarray] = {}
    with _open_maybe_gzip(path, "rb") as fh:
        vocab_size, dim = _parse_w2v_header(fh, path)
        vec_bytes = 4 * dim
        limit = vocab_size if max_words is None else min(max_words, vocab_size)
        for i in range(limit):
            word = bytearray()
            while True:
                ch = fh.read(1)
                if not ch:
                    raise ValueError(
                        f"{path}: truncated after {i} of {vocab_size} words"
                    )
                if ch == b" ":
                    break
                if ch != b"\n":
                    word.extend(ch)
            raw = fh.read(vec_bytes)
            if len(raw) != vec_bytes:
                raise ValueError(f"{path}: truncated after {i} of {vocab_size} words")
            text = word.decode("utf-8", errors="replace")
            if vocab_filter is not None and text not in vocab_filter:
                continue
            vec = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            vocab[text] = vec
    return EmbeddingTable(dim=dim, vocab=vocab)


@dataclass
class SentenceVector:
    values: np.ndarray
    token_count: int


def corpus_vocabulary(table) -> set[str]:
    """Token forms a pair table can look up: raw scrubbed and lowercased.

    Use as ``vocab_filter`` for the loaders to avoid holding a multi-million
    word embedding file in memory.
    """
    words: set[str] = set()
    for r in table:
        for text in (r.question1, r.question2):
            for tok in tokenize(scrub_text(text)):
                words.add(tok)
                words.add(tok.lower())
    return words


def embedding_tokens(text: str, table: EmbeddingTable) -> list[str]:
    """Tokens of a question prepared for embedding features.

    Punctuation is stripped with case preserved (the reference binary
    vocabulary is cased), stop words are removed, and tokens missing from
    the vocabulary are dropped.
    """
    tokens = remove_stopwords(tokenize(scrub_text(text)))
    return [t for t in tokens if table.lookup(t) is not None]


def sentence_vector(
    tokens: list[str], table: EmbeddingTable, normalize_words: bool = False
) -> SentenceVector:
    """Mean of the word vectors of in-vocabulary tokens.

    With ``normalize_words`` each word vector is L2-normalized before
    averaging.  No in-vocabulary tokens gives the zero vector.
    """
    found = []
    for t in tokens:
        vec = table.lookup(t)
        if vec is None:
            continue
        if normalize_words:
            norm = np.linalg.norm(vec)
            if norm > 0:
                vec = vec / norm
        found.append(vec)
    if not found:
        return SentenceVector(np.zeros(table.dim), 0)
    return SentenceVector(np.mean(found, axis=0), len(found))


def _bag_of_words(tokens: list[str], table: EmbeddingTable):
    counts: dict[str, int] = {}
    for t in tokens:
        vec = table.lookup(t)
        if vec is None:
            continue
        key = t if t in table.vocab else t.lower()
        counts[key] = counts.get(key, 0) + 1
    words = sorted(counts)
    weights = np.array([counts[w] for w in words], dtype=np.float64)
    if words:
        weights = weights / weights.sum()
    return words, weights


def solve_transport(
    weights1: np.ndarray, weights2: np.ndarray, costs: np.ndarray
) -> float:
    """Minimum cost of moving distribution 1 onto distribution 2.

    Solved as the exact transportation linear program; supports here are
    short sentences, so the LP stays tiny.
    """
    m, n = costs.shape
    # flow conservation rows: one per source, one per sink (last sink row
    # is redundant and dropped to keep the system full rank)
    a_eq = np.zeros((m + n - 1, m * n))
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n - 1):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([weights1, weights2[:-1]])
    res = linprog(costs.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:  # pragma: no cover - tiny feasible LPs always solve
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


def wmd(
    tokens1: list[str],
    tokens2: list[str],
    table: EmbeddingTable,
    normalize_words: bool = False,
) -> float:
    """Word-mover distance between two token lists.

    Exact optimal transport between the bag-of-words distributions with
    euclidean ground costs between word vectors (unit-normalized first when
    ``normalize_words`` is set).  Out-of-vocabulary tokens are dropped; an
    empty side after filtering returns ``WMD_EMPTY_SENTINEL``.
    """
    words1, w1 = _bag_of_words(tokens1, table)
    words2, w2 = _bag_of_words(tokens2, table)
    if not words1 or not words2:
        return WMD_EMPTY_SENTINEL
    if words1 == words2 and np.array_equal(w1, w2):
        return 0.0
    v1 = np.stack([table.vocab[w] for w in words1])
    v2 = np.stack([table.vocab[w] for w in words2])
    if normalize_words:
        v1 = v1 / np.maximum(np.linalg.norm(v1, axis=1, keepdims=True), 1e-300)
        v2 = v2 / np.maximum(np.linalg.norm(v2, axis=1, keepdims=True), 1e-300)
    diff = v1[:, None, :] - v2[None, :, :]
    costs = np.sqrt((diff * diff).sum(axis=2))
    return solve_transport(w1, w2, costs)


def _values(u) -> np.ndarray:
    return u.values if isinstance(u, SentenceVector) else np.asarray(u, dtype=float)


def distance(u, v, metric: str) -> float:
    """One of the seven component-wise vector distances.

    Accepts SentenceVector or plain arrays of equal dimension.
    """
    x = _values(u)
    y = _values(v)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if metric == "cosine":
        nx = np.linalg.norm(x)
        ny = np.linalg.norm(y)
        if nx == 0.0 and ny == 0.0:
            return 0.0
        if nx == 0.0 or ny == 0.0:
            return 1.0
        return float(1.0 - np.dot(x, y) / (nx * ny))
    if metric == "cityblock":
        return float(np.abs(x - y).sum())
    if metric == "euclidean":
        return float(np.sqrt(((x - y) ** 2).sum()))
    if metric == "minkowski3":
        return float(np.cbrt((np.abs(x - y) ** 3).sum()))
    if metric == "canberra":
        num = np.abs(x - y)
        den = np.abs(x) + np.abs(y)
        terms = np.divide(num, den, out=np.zeros_like(num), where=den != 0)
        return float(terms.sum())
    if metric == "braycurtis":
        den = np.abs(x + y).sum()
        if den == 0.0:
            return 0.0
        return float(np.abs(x - y).sum() / den)
    if metric == "jaccard":
        either = (x != 0) | (y != 0)
        if not either.any():
            return 0.0
        return float(((x != y) & either).sum() / either.sum())
    raise ValueError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class Moments:
    skew: float
    kurtosis: float


def moments(u) -> Moments:
    """Sample skewness and excess kurtosis of the vector's components.

    Central-moment definitions: skew = m3 / m2^1.5, kurtosis = m4 / m2^2 - 3.
    A constant vector (m2 = 0) is imputed to (0, 0).
    """
    x = _values(u)
    if x.size < 2:
        raise ValueError("moments need at least 2 components")
    centered = x - x.mean()
    m2 = np.mean(centered**2)
    if m2 == 0.0:
        return Moments(0.0, 0.0)
    m3 = np.mean(centered**3)
    m4 = np.mean(centered**4)
    return Moments(float(m3 / m2**1.5), float(m4 / m2**2 - 3.0))
