"""Hot numeric kernels: grouped counting, histogramming, pairwise divergence.

Each kernel has a pure-numpy implementation (the *_numpy functions) and,
when numba is importable and FAIRAUDIT_NO_NUMBA is unset, a @njit-compiled
loop version. The public names dispatch to whichever path is active;
both paths produce identical results and the benchmark in benchmarks/
compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

DIV_KL = 0
DIV_TV = 1

# column layout of group_binary_counts output
COL_N = 0            # member count
COL_PRED_MISSING = 1
COL_PRED_POS = 2     # predicted == positive
COL_TRUE_MISSING = 3
COL_TRUE_POS = 4     # true == positive
COL_TP = 5           # true positive and predicted positive
COL_TN = 6           # true negative and predicted negative
N_COLS = 7


def _numba_enabled() -> bool:
    if os.environ.get("FAIRAUDIT_NO_NUMBA"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()


def group_binary_counts_numpy(group_ids, n_groups, pred, true):
    """Per-group confusion counts.

    group_ids: int64 per record, -1 = not in any included subgroup.
    pred/true: int8 per record, 1 = positive label, 0 = other, -1 = missing.
    Returns int64 array (n_groups, N_COLS).
    """
    out = np.zeros((n_groups, N_COLS), dtype=np.int64)
    mask = group_ids >= 0
    g = group_ids[mask]
    p = pred[mask]
    t = true[mask]
    out[:, COL_N] = np.bincount(g, minlength=n_groups)
    out[:, COL_PRED_MISSING] = np.bincount(g[p == -1], minlength=n_groups)
    out[:, COL_PRED_POS] = np.bincount(g[p == 1], minlength=n_groups)
    out[:, COL_TRUE_MISSING] = np.bincount(g[t == -1], minlength=n_groups)
    out[:, COL_TRUE_POS] = np.bincount(g[t == 1], minlength=n_groups)
    out[:, COL_TP] = np.bincount(g[(t == 1) & (p == 1)], minlength=n_groups)
    out[:, COL_TN] = np.bincount(g[(t == 0) & (p == 0)], minlength=n_groups)
    return out


def group_class_counts_numpy(group_ids, n_groups, classes, n_classes):
    """Per-group predicted-class counts; classes is an int64 code per record."""
    mask = (group_ids >= 0) & (classes >= 0)
    flat = group_ids[mask] * n_classes + classes[mask]
    counts = np.bincount(flat, minlength=n_groups * n_classes)
    return counts.reshape(n_groups, n_classes)


def histogram_counts_numpy(values, edges):
    """Histogram with out-of-range values clamped into the edge bins."""
    idx = np.searchsorted(edges, values, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    return np.bincount(idx, minlength=len(edges) - 1).astype(np.int64)


def pairwise_divergence_matrix_numpy(probs, kind):
    """Divergence for every ordered pair of rows; diagonal stays 0."""
    n = probs.shape[0]
    logp = np.log(probs)
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if kind == DIV_KL:
                out[i, j] = np.sum(probs[i] * (logp[i] - logp[j]))
            else:
                out[i, j] = 0.5 * np.sum(np.abs(probs[i] - probs[j]))
    return out


if NUMBA_ENABLED:
    from numba import njit

    @njit(cache=True)
    def _group_binary_counts_nb(group_ids, n_groups, pred, true):
        out = np.zeros((n_groups, N_COLS), dtype=np.int64)
        for r in range(group_ids.shape[0]):
            g = group_ids[r]
            if g < 0:
                continue
            out[g, COL_N] += 1
            p = pred[r]
            t = true[r]
            if p == -1:
                out[g, COL_PRED_MISSING] += 1
            elif p == 1:
                out[g, COL_PRED_POS] += 1
            if t == -1:
                out[g, COL_TRUE_MISSING] += 1
            elif t == 1:
                out[g, COL_TRUE_POS] += 1
                if p == 1:
                    out[g, COL_TP] += 1
            else:
                if p == 0:
                    out[g, COL_TN] += 1
        return out

    @njit(cache=True)
    def _group_class_counts_nb(group_ids, n_groups, classes, n_classes):
        out = np.zeros((n_groups, n_classes), dtype=np.int64)
        for r in range(group_ids.shape[0]):
            g = group_ids[r]
            c = classes[r]
            if g >= 0 and c >= 0:
                out[g, c] += 1
        return out

    @njit(cache=True)
    def _histogram_counts_nb(values, edges):
        nbins = edges.shape[0] - 1
        out = np.zeros(nbins, dtype=np.int64)
        for r in range(values.shape[0]):
            idx = np.searchsorted(edges, values[r], side="right") - 1
            if idx < 0:
                idx = 0
            elif idx > nbins - 1:
                idx = nbins - 1
            out[idx] += 1
        return out

    @njit(cache=True)
    def _pairwise_divergence_matrix_nb(probs, kind):
        n, b = probs.shape
        logp = np.log(probs)
        out = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                d = 0.0
                if kind == DIV_KL:
                    for k in range(b):
                        d += probs[i, k] * (logp[i, k] - logp[j, k])
                else:
                    for k in range(b):
                        d += abs(probs[i, k] - probs[j, k])
                    d *= 0.5
                out[i, j] = d
        return out

    def group_binary_counts(group_ids, n_groups, pred, true):
        return _group_binary_counts_nb(group_ids, n_groups, pred, true)

    def group_class_counts(group_ids, n_groups, classes, n_classes):
        return _group_class_counts_nb(group_ids, n_groups, classes, n_classes)

    def histogram_counts(values, edges):
        return _histogram_counts_nb(values, edges)

    def pairwise_divergence_matrix(probs, kind):
        return _pairwise_divergence_matrix_nb(probs, kind)

else:
    group_binary_counts = group_binary_counts_numpy
    group_class_counts = group_class_counts_numpy
    histogram_counts = histogram_counts_numpy
    pairwise_divergence_matrix = pairwise_divergence_matrix_numpy


def warmup():
    """Trigger jit compilation of every kernel on toy inputs."""
    g = np.array([0, 1, -1], dtype=np.int64)
    b = np.array([1, 0, -1], dtype=np.int8)
    group_binary_counts(g, 2, b, b)
    group_class_counts(g, 2, g.clip(0), 2)
    histogram_counts(np.array([0.1, 0.9]), np.array([0.0, 0.5, 1.0]))
    pairwise_divergence_matrix(np.array([[0.5, 0.5], [0.4, 0.6]]), DIV_KL)
    pairwise_divergence_matrix(np.array([[0.5, 0.5], [0.4, 0.6]]), DIV_TV)
