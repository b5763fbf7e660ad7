"""Dense CART-style tree growing shared by every tree-based classifier.

One engine serves all split criteria through two per-row stat channels
``a`` and ``b`` plus an integer occurrence count:

* Gini trees use a = weight * label, b = weight; the per-side score is
  ``-a (b - a) / b`` (negative weighted impurity), so maximizing
  ``score_L + score_R - score_parent`` maximizes the impurity decrease.
* Second-order boosting uses a = gradient sum, b = hessian sum with score
  ``a^2 / (b + lambda)``; first-order boosting is the same with unit
  hessians and lambda 0 (variance reduction on residuals).

Recorded split gain is ``score_scale * raw_gain - gain_penalty`` (0.5 and
gamma for the regularized booster, 1 and 0 otherwise) and a split is kept
only when that value is positive.

Candidate features are visited in ascending index order and candidate
thresholds in ascending value order; the first strictly best gain wins.
The sparse builder mirrors the same ordering so both produce the same
trees on ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_GAIN = 1e-12


@dataclass
class Tree:
    feature: np.ndarray  # int, -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # leaf payload
    gain: np.ndarray  # recorded gain at internal nodes
    n_node: np.ndarray  # row count per node

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "gain": self.gain.tolist(),
            "n_node": self.n_node.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64),
            gain=np.asarray(d["gain"], dtype=np.float64),
            n_node=np.asarray(d["n_node"], dtype=np.int64),
        )

    def feature_gains(self, n_features: int) -> np.ndarray:
        out = np.zeros(n_features)
        internal = self.feature >= 0
        np.add.at(out, self.feature[internal], self.gain[internal])
        return out


def gini_score(a, b):
    # negative weighted impurity: -b * p * (1 - p) with p = a / b; an empty
    # side (b = 0, only reachable as an invalid candidate) scores 0
    return -(a * (b - a)) / np.maximum(b, 1e-300)


def gini_is_pure(a, b) -> bool:
    return a == 0.0 or a == b


def make_grad_score(lam: float):
    def grad_score(a, b):
        # saturated probabilities can drive the hessian sum to exactly 0
        return (a * a) / np.maximum(b + lam, 1e-300)

    return grad_score


class _TreeBuilder:
    def __init__(self):
        self.feature = [np.int64(-1)]
        self.threshold = [0.0]
        self.left = [np.int64(-1)]
        self.right = [np.int64(-1)]
        self.value = [0.0]
        self.gain = [0.0]
        self.n_node = [0]

    def new_node(self) -> int:
        self.feature.append(np.int64(-1))
        self.threshold.append(0.0)
        self.left.append(np.int64(-1))
        self.right.append(np.int64(-1))
        self.value.append(0.0)
        self.gain.append(0.0)
        self.n_node.append(0)
        return len(self.feature) - 1

    def set_split(self, node, feature, threshold, gain, left, right):
        self.feature[node] = np.int64(feature)
        self.threshold[node] = float(threshold)
        self.gain[node] = float(gain)
        self.left[node] = np.int64(left)
        self.right[node] = np.int64(right)

    def finish(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
            gain=np.asarray(self.gain, dtype=np.float64),
            n_node=np.asarray(self.n_node, dtype=np.int64),
        )


def grow_tree_dense(
    X: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    counts: np.ndarray,
    score_fn,
    leaf_value_fn,
    max_depth: int | None,
    min_samples_leaf: int,
    max_features: int | None,
    rng: np.random.Generator,
    random_thresholds: bool = False,
    score_scale: float = 1.0,
    gain_penalty: float = 0.0,
    min_gain: float = MIN_GAIN,
    purity_fn=None,
) -> Tree:
    """Grow one tree on a dense matrix; see the module docstring for the
    criterion conventions.

    ``min_gain`` is the strict lower bound a recorded gain must exceed; the
    impurity criteria pass -inf so impure nodes always split when a valid
    candidate exists (``purity_fn`` stops the pure ones), while the boosting
    criteria demand strictly positive gain."""
    n_rows, n_features = X.shape
    builder = _TreeBuilder()
    rows0 = np.flatnonzero(counts > 0)
    stack = [(0, rows0, 0)]  # node id, row indices, depth
    while stack:
        node, rows, depth = stack.pop()
        builder.n_node[node] = int(counts[rows].sum())
        split = None
        expandable = (max_depth is None or depth < max_depth) and len(rows) >= 2
        if expandable and purity_fn is not None:
            expandable = not purity_fn(float(a[rows].sum()), float(b[rows].sum()))
        if expandable:
            split = _best_split_dense(
                X,
                rows,
                a,
                b,
                counts,
                score_fn,
                min_samples_leaf,
                max_features,
                rng,
                random_thresholds,
                score_scale,
                gain_penalty,
                min_gain,
            )
        if split is None:
            builder.value[node] = float(leaf_value_fn(rows))
            continue
        feature, threshold, gain = split
        mask = X[rows, feature] < threshold
        left_id = builder.new_node()
        right_id = builder.new_node()
        builder.set_split(node, feature, threshold, gain, left_id, right_id)
        # push right first so the left subtree is numbered next (preorder)
        stack.append((right_id, rows[~mask], depth + 1))
        stack.append((left_id, rows[mask], depth + 1))
    return builder.finish()


def _best_split_dense(
    X,
    rows,
    a,
    b,
    counts,
    score_fn,
    min_samples_leaf,
    max_features,
    rng,
    random_thresholds,
    score_scale,
    gain_penalty,
    min_gain,
):
    n_features = X.shape[1]
    if max_features is not None and max_features < n_features:
        candidates = np.sort(rng.choice(n_features, size=max_features, replace=False))
    else:
        candidates = np.arange(n_features)

    ra = a[rows]
    rb = b[rows]
    rc = counts[rows]
    total_a = ra.sum()
    total_b = rb.sum()
    total_c = rc.sum()
    parent_score = score_fn(total_a, total_b)

    best = None  # (gain, feature, threshold)
    for f in candidates:
        v = X[rows, f]
        if random_thresholds:
            lo = v.min()
            hi = v.max()
            if lo == hi:
                continue
            t = rng.uniform(lo, hi)
            mask = v < t
            lc = rc[mask].sum()
            if lc < min_samples_leaf or total_c - lc < min_samples_leaf:
                continue
            la = ra[mask].sum()
            lb = rb[mask].sum()
            raw = score_fn(la, lb) + score_fn(total_a - la, total_b - lb) - parent_score
            gain = score_scale * raw - gain_penalty
            if gain > min_gain and (best is None or gain > best[0]):
                best = (gain, f, t)
            continue

        order = np.argsort(v, kind="stable")
        sv = v[order]
        ca = np.cumsum(ra[order])[:-1]
        cb = np.cumsum(rb[order])[:-1]
        cc = np.cumsum(rc[order])[:-1]
        valid = (
            (sv[:-1] < sv[1:])
            & (cc >= min_samples_leaf)
            & (total_c - cc >= min_samples_leaf)
        )
        if not valid.any():
            continue
        idx = np.flatnonzero(valid)
        raw = (
            score_fn(ca[idx], cb[idx])
            + score_fn(total_a - ca[idx], total_b - cb[idx])
            - parent_score
        )
        gains = score_scale * raw - gain_penalty
        pos = int(np.argmax(gains))
        gain = float(gains[pos])
        if gain > min_gain and (best is None or gain > best[0]):
            cut = idx[pos]
            threshold = 0.5 * (sv[cut] + sv[cut + 1])
            best = (gain, f, float(threshold))
    if best is None:
        return None
    gain, feature, threshold = best
    return int(feature), float(threshold), float(gain)


def tree_apply_dense(tree: Tree, X: np.ndarray) -> np.ndarray:
    """Route every row to its leaf and return the leaf values."""
    n = X.shape[0]
    cur = np.zeros(n, dtype=np.int64)
    while True:
        feat = tree.feature[cur]
        internal = feat >= 0
        if not internal.any():
            break
        idx = np.flatnonzero(internal)
        f = feat[idx]
        go_left = X[idx, f] < tree.threshold[cur[idx]]
        cur[idx] = np.where(go_left, tree.left[cur[idx]], tree.right[cur[idx]])
    return tree.value[cur]
