"""Classifiers, evaluation metrics, feature importance, and grid search.

The seven classifier kinds: knn, decision_tree, random_forest,
extra_trees, adaboost, gbm, xgb.  All train on a dense float matrix or a
nonnegative scipy.sparse matrix and predict a probability for class 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..corpus import stratified_indices
from ._models import (
    DEFAULT_HYPERPARAMETERS,
    KINDS,
    AdaBoostModel,
    BoostedTreesModel,
    DecisionTreeModel,
    ForestModel,
    KnnModel,
    train_model,
)
from ._tree import Tree
from .metrics import Metrics, compute_metrics, log_loss

__all__ = [
    "KINDS",
    "DEFAULT_HYPERPARAMETERS",
    "ClassifierSpec",
    "Metrics",
    "ImportanceReport",
    "train",
    "predict_proba",
    "evaluate",
    "feature_importance",
    "grid_search",
    "save_model",
    "load_model",
    "compute_metrics",
    "log_loss",
]

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        hp = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        hp.update(self.hyperparameters)
        return hp

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hyperparameters": dict(self.hyperparameters)}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierSpec":
        return cls(kind=d["kind"], hyperparameters=dict(d.get("hyperparameters", {})))


@dataclass
class ImportanceReport:
    ranked: list[tuple[str, float]]  # (feature name, weight), descending
    method: str  # "native_gain" or "permutation"


def train(spec: ClassifierSpec, X, y):
    """Train one classifier; deterministic for a fixed seed."""
    return train_model(spec.kind, spec.resolved(), X, y)


def predict_proba(model, X) -> np.ndarray:
    return model.predict_proba(X)


def evaluate(model, X, y) -> Metrics:
    return compute_metrics(np.asarray(y), model.predict_proba(X))


def feature_importance(
    model,
    X,
    y,
    feature_names: list[str] | None = None,
    n_repeats: int = 10,
    seed: int = 0,
) -> ImportanceReport:
    """Importance weights: normalized split gain for tree models,
    permutation accuracy drop (clipped at zero, then normalized) for the
    nearest-neighbour model."""
    native = model.native_importance()
    if native is not None:
        weights = native
        method = "native_gain"
    else:
        weights = _permutation_importance(model, X, np.asarray(y), n_repeats, seed)
        method = "permutation"
    if feature_names is None:
        feature_names = [f"f{i}" for i in range(model.n_features)]
    order = sorted(range(len(weights)), key=lambda i: (-weights[i], i))
    ranked = [(feature_names[i], float(weights[i])) for i in order]
    return ImportanceReport(ranked=ranked, method=method)


def _permutation_importance(model, X, y, n_repeats, seed) -> np.ndarray:
    import scipy.sparse as sp

    rng = np.random.default_rng(seed)
    baseline = float(np.mean(model.predict(X) == y))
    n_features = X.shape[1]
    sparse = sp.issparse(X)
    drops = np.zeros(n_features)
    for f in range(n_features):
        for _ in range(n_repeats):
            perm = rng.permutation(X.shape[0])
            if sparse:
                shuffled = sp.lil_matrix(X.tocsr(), copy=True)
                col = X.tocsc()[:, f].toarray().ravel()
                shuffled[:, f] = col[perm][:, None]
                shuffled = shuffled.tocsr()
            else:
                shuffled = np.array(X, copy=True)
                shuffled[:, f] = shuffled[perm, f]
            acc = float(np.mean(model.predict(shuffled) == y))
            drops[f] += baseline - acc
    drops = np.maximum(drops / n_repeats, 0.0)
    total = drops.sum()
    return drops / total if total > 0 else drops


def grid_search(
    grid: list[ClassifierSpec],
    X,
    y,
    val_fraction: float = 0.10,
    seed: int = 0,
) -> tuple[ClassifierSpec, list[dict]]:
    """Pick the spec with the best validation accuracy.

    A stratified slice of the supplied (training) data is held out once;
    every candidate trains on the remainder and is scored on the slice.
    Ties keep the earliest spec in grid order.
    """
    if not grid:
        raise ValueError("empty grid")
    y = np.asarray(y)
    fit_idx, val_idx = stratified_indices(y, val_fraction, seed)
    X_fit, X_val = X[fit_idx], X[val_idx]
    y_fit, y_val = y[fit_idx], y[val_idx]
    table = []
    best_i = 0
    best_score = -1.0
    for i, spec in enumerate(grid):
        model = train(spec, X_fit, y_fit)
        score = float(np.mean(model.predict(X_val) == y_val))
        table.append({"spec": spec.to_dict(), "val_accuracy": score})
        if score > best_score:
            best_score = score
            best_i = i
    return grid[best_i], table


def save_model(model, path: str | Path, train_data_path: str | None = None) -> None:
    """Persist a model as versioned JSON.

    Tree ensembles serialize completely; the nearest-neighbour model saves
    its metadata plus a reference to the training feature file, which is
    re-read at load time.
    """
    doc = {"format_version": MODEL_FORMAT_VERSION, **model.to_dict()}
    if model.kind == "knn":
        if train_data_path is None:
            raise ValueError("knn persistence requires train_data_path")
        doc["state"]["train_data"] = str(train_data_path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_model(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model format")
    kind = doc["kind"]
    hp = doc["hyperparameters"]
    n_features = doc["n_features"]
    state = doc["state"]
    if kind == "knn":
        X, y = _load_training_features(state["train_data"])
        model = KnnModel(hp, n_features, X, y)
        return model
    if kind == "decision_tree":
        return DecisionTreeModel(hp, n_features, Tree.from_dict(state["tree"]))
    if kind in ("random_forest", "extra_trees"):
        trees = [Tree.from_dict(t) for t in state["trees"]]
        return ForestModel(kind, hp, n_features, trees)
    if kind == "adaboost":
        stumps = [Tree.from_dict(t) for t in state["stumps"]]
        return AdaBoostModel(hp, n_features, stumps, list(state["alphas"]))
    if kind in ("gbm", "xgb"):
        trees = [Tree.from_dict(t) for t in state["trees"]]
        return BoostedTreesModel(kind, hp, n_features, state["base_margin"], trees)
    raise ValueError(f"unknown classifier kind {kind!r}")


def _load_training_features(path: str):
    """Load (X, y) from a dense feature CSV or a sparse .npz file."""
    if path.endswith(".npz"):
        from .. import sparse_io

        return sparse_io.load_sparse_features(path)
    from ..featmat import load_matrix

    m = load_matrix(path)
    return m.rows, m.labels
