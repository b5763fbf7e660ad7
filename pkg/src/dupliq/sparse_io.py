"""Single-file storage for sparse feature matrices with labels.

Written as a numpy .npz archive holding the CSR arrays plus the aligned
label vector; used by the TF-IDF pipeline and the nearest-neighbour
model's training-data reference.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.sparse as sp


def save_sparse_features(path: str | Path, X, labels) -> None:
    X = sp.csr_matrix(X)
    np.savez(
        path,
        data=X.data,
        indices=X.indices,
        indptr=X.indptr,
        shape=np.asarray(X.shape, dtype=np.int64),
        labels=np.asarray(labels, dtype=np.int64),
    )


def load_sparse_features(path: str | Path) -> tuple[sp.csr_matrix, np.ndarray]:
    with np.load(path) as blob:
        X = sp.csr_matrix(
            (blob["data"], blob["indices"], blob["indptr"]),
            shape=tuple(blob["shape"]),
        )
        labels = blob["labels"]
    return X, labels
