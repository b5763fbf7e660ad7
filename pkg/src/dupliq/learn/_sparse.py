"""Level-wise tree growing over sparse nonnegative feature matrices.

Implicit zeros are real zero values: for any positive threshold they fall
on the left side of a split.  Columns are pre-sorted by value once, then
each tree level makes a single vectorized pass over the stored entries,
grouping them by (node, column) and scanning cumulative stats, so the work
per level is proportional to the number of nonzeros rather than to
nodes x columns.

Criterion conventions (stat channels a/b, score_fn, score_scale,
gain_penalty) are shared with the dense builder in ``_tree``; candidate
order is the same (ascending column, ascending threshold, zero boundary
first), so both builders pick identical splits apart from float summation
order.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ._tree import MIN_GAIN, Tree, _TreeBuilder


class SparseColumns:
    """A CSC matrix re-indexed as entry arrays sorted by (column, value)."""

    def __init__(self, X):
        X = sp.csc_matrix(X, copy=True)
        X.eliminate_zeros()
        if X.data.size and X.data.min() < 0:
            raise ValueError("sparse feature values must be nonnegative")
        self.n_rows, self.n_cols = X.shape
        col_ids = np.repeat(np.arange(self.n_cols, dtype=np.int64), np.diff(X.indptr))
        order = np.lexsort((X.data, col_ids))
        self.ecol = col_ids[order]
        self.erow = X.indices[order].astype(np.int64)
        self.evals = X.data[order].astype(np.float64)
        self.csc = X

    def column_values(self, rows: np.ndarray, col: int, buf: np.ndarray) -> np.ndarray:
        """Values of one column at the given rows via a scratch buffer."""
        start, end = self.csc.indptr[col], self.csc.indptr[col + 1]
        touched = self.csc.indices[start:end]
        buf[touched] = self.csc.data[start:end]
        out = buf[rows].copy()
        buf[touched] = 0.0
        return out


def grow_tree_sparse(
    sc: SparseColumns,
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
    n_rows, n_cols = sc.n_rows, sc.n_cols
    builder = _TreeBuilder()
    node_of_row = np.where(counts > 0, 0, -1).astype(np.int64)

    # per active node: (node id, total a, total b, total count)
    active = [(0, float(a[counts > 0].sum()), float(b[counts > 0].sum()),
               int(counts.sum()))]
    buf = np.zeros(n_rows)
    depth = 0
    while active:
        for nid, _, _, cnt in active:
            builder.n_node[nid] = cnt
        rows_of = _group_rows_by_node(node_of_row)
        if max_depth is not None and depth >= max_depth:
            break
        splits = _find_level_splits(
            sc, node_of_row, active, a, b, counts, score_fn, min_samples_leaf,
            max_features, rng, random_thresholds, score_scale, gain_penalty,
            len(builder.feature), min_gain,
        )
        next_active = []
        for local, (nid, node_a, node_b, _) in enumerate(active):
            rows = rows_of[nid]
            if purity_fn is not None and purity_fn(node_a, node_b):
                splits[local] = None
            if splits[local] is None:
                builder.value[nid] = float(leaf_value_fn(rows))
                node_of_row[rows] = -1
                continue
            feature, threshold, gain, left_stats, right_stats = splits[local]
            v = sc.column_values(rows, feature, buf)
            mask = v < threshold
            left_id = builder.new_node()
            right_id = builder.new_node()
            builder.set_split(nid, feature, threshold, gain, left_id, right_id)
            node_of_row[rows[mask]] = left_id
            node_of_row[rows[~mask]] = right_id
            next_active.append((left_id, *left_stats))
            next_active.append((right_id, *right_stats))
        active = next_active
        depth += 1
    # depth limit reached: everything still active becomes a leaf
    for nid, _, _, _ in active:
        builder.value[nid] = float(leaf_value_fn(rows_of[nid]))
    return builder.finish()


def _group_rows_by_node(node_of_row: np.ndarray) -> dict[int, np.ndarray]:
    act = np.flatnonzero(node_of_row >= 0)
    order = np.argsort(node_of_row[act], kind="stable")
    act = act[order]
    nodes, starts = np.unique(node_of_row[act], return_index=True)
    bounds = np.append(starts[1:], len(act))
    return {int(n): act[s:e] for n, s, e in zip(nodes, starts, bounds)}


def _find_level_splits(
    sc,
    node_of_row,
    active,
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
    n_tree_nodes,
    min_gain,
):
    """Best split per active node, or None.  One vectorized pass."""
    k = len(active)
    node_ids = np.array([nid for nid, *_ in active], dtype=np.int64)
    tot_a = np.array([s[1] for s in active])
    tot_b = np.array([s[2] for s in active])
    tot_c = np.array([s[3] for s in active], dtype=np.int64)
    parent_score = score_fn(tot_a, tot_b)

    local_map = np.full(n_tree_nodes, -1, dtype=np.int64)
    local_map[node_ids] = np.arange(k)

    e_node = node_of_row[sc.erow]
    keep = e_node >= 0
    e_local = np.full(len(e_node), -1, dtype=np.int64)
    e_local[keep] = local_map[e_node[keep]]
    keep &= e_local >= 0

    sampled_cols = None
    if max_features is not None and max_features < sc.n_cols:
        sampled_cols = np.zeros((k, sc.n_cols), dtype=bool)
        for i in range(k):
            sampled_cols[i, rng.choice(sc.n_cols, size=max_features, replace=False)] = True
        keep &= np.where(keep, sampled_cols[np.maximum(e_local, 0), sc.ecol], False)

    idx = np.flatnonzero(keep)
    if len(idx) == 0:
        return [None] * k

    g_node = e_local[idx]
    order = np.argsort(g_node, kind="stable")
    idx = idx[order]
    g_node = g_node[order]
    g_col = sc.ecol[idx]
    g_val = sc.evals[idx]
    g_row = sc.erow[idx]
    g_a = a[g_row]
    g_b = b[g_row]
    g_c = counts[g_row].astype(np.int64)
    m = len(idx)

    new_group = np.empty(m, dtype=bool)
    new_group[0] = True
    new_group[1:] = (g_node[1:] != g_node[:-1]) | (g_col[1:] != g_col[:-1])
    grp = np.cumsum(new_group) - 1
    gstart = np.flatnonzero(new_group)
    gend = np.append(gstart[1:], m) - 1

    ca = np.cumsum(g_a)
    cb = np.cumsum(g_b)
    cc = np.cumsum(g_c)
    base_a = (ca[gstart] - g_a[gstart])[grp]
    base_b = (cb[gstart] - g_b[gstart])[grp]
    base_c = (cc[gstart] - g_c[gstart])[grp]
    ca -= base_a
    cb -= base_b
    cc -= base_c

    grp_node = g_node[gstart]
    grp_col = g_col[gstart]
    # stats of the implicit zeros of each (node, column) group
    zero_a = tot_a[grp_node] - ca[gend]
    zero_b = tot_b[grp_node] - cb[gend]
    zero_c = tot_c[grp_node] - cc[gend]

    if random_thresholds:
        return _random_threshold_splits(
            k, grp, gstart, gend, grp_node, grp_col, g_val, g_a, g_b, g_c,
            zero_a, zero_b, zero_c, tot_a, tot_b, tot_c, parent_score,
            score_fn, min_samples_leaf, rng, score_scale, gain_penalty, min_gain,
        )

    # candidates between consecutive entries of the same group
    is_last = np.zeros(m, dtype=bool)
    is_last[gend] = True
    left_a = zero_a[grp] + ca
    left_b = zero_b[grp] + cb
    left_c = zero_c[grp] + cc
    right_c = tot_c[g_node] - left_c
    valid = (~is_last) & (left_c >= min_samples_leaf) & (right_c >= min_samples_leaf)
    nxt = np.minimum(np.arange(m) + 1, m - 1)
    valid &= g_val < g_val[nxt]

    raw = (
        score_fn(left_a, left_b)
        + score_fn(tot_a[g_node] - left_a, tot_b[g_node] - left_b)
        - parent_score[g_node]
    )
    gains = np.where(valid, score_scale * raw - gain_penalty, -np.inf)
    thresholds = 0.5 * (g_val + g_val[nxt])

    # the zero-boundary candidate per group: zeros go left, nonzeros right
    zb_valid = (
        (zero_c >= max(min_samples_leaf, 1))
        & (tot_c[grp_node] - zero_c >= min_samples_leaf)
    )
    zb_raw = (
        score_fn(zero_a, zero_b)
        + score_fn(tot_a[grp_node] - zero_a, tot_b[grp_node] - zero_b)
        - parent_score[grp_node]
    )
    zb_gains = np.where(zb_valid, score_scale * zb_raw - gain_penalty, -np.inf)
    zb_thresholds = 0.5 * g_val[gstart]

    # merge both candidate sets; order (node, -gain, col, threshold) puts the
    # winner of every node first with the dense builder's tie-break
    all_node = np.concatenate([g_node, grp_node])
    all_col = np.concatenate([g_col, grp_col])
    all_gain = np.concatenate([gains, zb_gains])
    all_thr = np.concatenate([thresholds, zb_thresholds])
    all_la = np.concatenate([left_a, zero_a])
    all_lb = np.concatenate([left_b, zero_b])
    all_lc = np.concatenate([left_c, zero_c])

    return _pick_best(
        k, all_node, all_col, all_gain, all_thr, all_la, all_lb, all_lc,
        tot_a, tot_b, tot_c, min_gain,
    )


def _random_threshold_splits(
    k, grp, gstart, gend, grp_node, grp_col, g_val, g_a, g_b, g_c,
    zero_a, zero_b, zero_c, tot_a, tot_b, tot_c, parent_score,
    score_fn, min_samples_leaf, rng, score_scale, gain_penalty, min_gain,
):
    lo = np.where(zero_c > 0, 0.0, g_val[gstart])
    hi = g_val[gend]
    spread = hi > lo
    t = np.where(spread, rng.uniform(lo, np.where(spread, hi, lo + 1.0)), np.nan)

    is_left = g_val < t[grp]
    n_groups = len(gstart)
    left_a = zero_a + np.bincount(grp, weights=np.where(is_left, g_a, 0.0), minlength=n_groups)
    left_b = zero_b + np.bincount(grp, weights=np.where(is_left, g_b, 0.0), minlength=n_groups)
    left_c = zero_c + np.bincount(grp, weights=np.where(is_left, g_c, 0.0), minlength=n_groups).astype(np.int64)
    valid = (
        spread
        & (left_c >= min_samples_leaf)
        & (tot_c[grp_node] - left_c >= min_samples_leaf)
    )
    raw = (
        score_fn(left_a, left_b)
        + score_fn(tot_a[grp_node] - left_a, tot_b[grp_node] - left_b)
        - parent_score[grp_node]
    )
    gains = np.where(valid, score_scale * raw - gain_penalty, -np.inf)
    return _pick_best(
        k, grp_node, grp_col, gains, np.where(spread, t, 0.0),
        left_a, left_b, left_c, tot_a, tot_b, tot_c, min_gain,
    )


def _pick_best(k, node, col, gain, thr, la, lb, lc, tot_a, tot_b, tot_c, min_gain):
    splits = [None] * k
    finite = gain > min_gain
    if not finite.any():
        return splits
    node, col, gain, thr = node[finite], col[finite], gain[finite], thr[finite]
    la, lb, lc = la[finite], lb[finite], lc[finite]
    order = np.lexsort((thr, col, -gain, node))
    node_sorted = node[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = node_sorted[1:] != node_sorted[:-1]
    for pos in np.flatnonzero(first):
        i = order[pos]
        n = node[i]
        left_stats = (float(la[i]), float(lb[i]), int(lc[i]))
        right_stats = (
            float(tot_a[n] - la[i]),
            float(tot_b[n] - lb[i]),
            int(tot_c[n] - lc[i]),
        )
        splits[n] = (int(col[i]), float(thr[i]), float(gain[i]), left_stats, right_stats)
    return splits


def tree_apply_sparse(tree: Tree, X) -> np.ndarray:
    """Route rows of a CSC/CSR matrix through a tree; returns leaf values."""
    X = sp.csc_matrix(X)
    n = X.shape[0]
    cur = np.zeros(n, dtype=np.int64)
    buf = np.zeros(n)
    while True:
        feat = tree.feature[cur]
        internal = feat >= 0
        if not internal.any():
            break
        idx = np.flatnonzero(internal)
        order = np.argsort(cur[idx], kind="stable")
        idx = idx[order]
        nodes, starts = np.unique(cur[idx], return_index=True)
        bounds = np.append(starts[1:], len(idx))
        for node, s, e in zip(nodes, starts, bounds):
            rows = idx[s:e]
            f = int(tree.feature[node])
            colstart, colend = X.indptr[f], X.indptr[f + 1]
            touched = X.indices[colstart:colend]
            buf[touched] = X.data[colstart:colend]
            go_left = buf[rows] < tree.threshold[node]
            buf[touched] = 0.0
            cur[rows] = np.where(go_left, tree.left[node], tree.right[node])
    return tree.value[cur]
