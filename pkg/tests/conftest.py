import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dupliq.embed import EmbeddingTable


@pytest.fixture
def tiny_table() -> EmbeddingTable:
    """Hand-built 2-d embedding table used across embedding tests."""
    return EmbeddingTable(
        dim=2,
        vocab={
            "a": np.array([3.0, 4.0]),
            "b": np.array([1.0, 0.0]),
            "c": np.array([0.0, 2.0]),
            "d": np.array([-1.0, 1.0]),
        },
    )


@pytest.fixture
def word_table() -> EmbeddingTable:
    """Small word table with realistic-looking vocabulary, 3 dimensions."""
    rng = np.random.default_rng(7)
    words = [
        "learn", "python", "code", "program", "language", "fast", "best",
        "way", "start", "guide", "book", "online", "course", "year", "time",
        "Python", "India", "people",
    ]
    vocab = {w: rng.normal(size=3) for w in words}
    return EmbeddingTable(dim=3, vocab=vocab)
