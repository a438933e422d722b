"""Independent brute-force reimplementation used as a test oracle.

Deliberately naive: plain python loops over row dicts, no numpy, no
shared code with the library. Rows are dicts carrying attribute values
plus optional "pred", "true", "score" entries.
"""

from __future__ import annotations

import math
from itertools import product


def partition_rows(rows, attrs):
    """key tuple -> list of row indices; rows missing a value are dropped."""
    groups = {}
    for i, row in enumerate(rows):
        values = tuple(row.get(a) for a in attrs)
        if None in values or "" in values:
            continue
        groups.setdefault(values, []).append(i)
    return groups


def candidate_keys(rows, attrs):
    domains = []
    for a in attrs:
        seen = sorted({row[a] for row in rows if row.get(a)})
        domains.append(seen)
    return list(product(*domains))


def group_stat(rows, idx, stat, positive):
    if stat == "pass":
        return sum(1 for i in idx if rows[i]["pred"] == positive) / len(idx)
    pos = [i for i in idx if rows[i]["true"] == positive]
    neg = [i for i in idx if rows[i]["true"] != positive]
    if stat in ("tpr", "fnr"):
        if not pos:
            return None
        tpr = sum(1 for i in pos if rows[i]["pred"] == positive) / len(pos)
        return tpr if stat == "tpr" else 1.0 - tpr
    if stat in ("tnr", "fpr"):
        if not neg:
            return None
        tnr = sum(1 for i in neg if rows[i]["pred"] != positive) / len(neg)
        return tnr if stat == "tnr" else 1.0 - tnr
    if stat == "gbr":
        if not pos:
            return None
        predicted = sum(1 for i in idx if rows[i]["pred"] == positive)
        return (predicted / len(idx)) / (len(pos) / len(idx))
    raise ValueError(stat)


def min_over_max(values):
    if not values:
        return None
    if len(values) == 1 or max(values) == 0:
        return 1.0
    # enumerate all pairwise ratios and take the smallest valid one
    best = None
    for i, a in enumerate(values):
        for j, b in enumerate(values):
            if i == j or b == 0:
                continue
            r = a / b
            if best is None or r < best:
                best = r
    if best is None:
        return 1.0
    return min(best, 1.0)


def ratio_metric(rows, attrs, stat, positive):
    groups = partition_rows(rows, attrs)
    values = []
    for idx in groups.values():
        v = group_stat(rows, idx, stat, positive)
        if v is not None:
            values.append(v)
    return min_over_max(values)


def disparate_impact(rows, attrs, positive):
    groups = partition_rows(rows, attrs)
    rates = [group_stat(rows, idx, "pass", positive) for idx in groups.values()]
    best = None
    for i, a in enumerate(rates):
        for j, b in enumerate(rates):
            if i == j or b == 0:
                continue
            r = a / b
            if best is None or r < best:
                best = r
    return 1.0 if best is None else best


def equalized_odds(rows, attrs, positive):
    parts = [ratio_metric(rows, attrs, s, positive) for s in ("tpr", "fpr")]
    defined = [p for p in parts if p is not None]
    return min(defined) if defined else None


def multiclass_eoddr(rows, attrs, classes):
    groups = partition_rows(rows, attrs)
    best = None
    for cls in classes:
        rates = [
            sum(1 for i in idx if rows[i]["pred"] == cls) / len(idx)
            for idx in groups.values()
        ]
        r = min_over_max(rates)
        if best is None or r < best:
            best = r
    return best


def skew(rows_in_list, population_counts, subgroup, k):
    """rows_in_list: subgroup key per rank position (index 0 = rank 1)."""
    total = sum(population_counts.values())
    pop = population_counts.get(subgroup, 0) / total
    if pop == 0:
        return None
    top = sum(1 for key in rows_in_list[:k] if key == subgroup) / k
    return top / pop


def mean_attention(rows_in_list, subgroup, att):
    weights = [att(k) for k, key in enumerate(rows_in_list, 1) if key == subgroup]
    if not weights:
        return None
    return sum(weights) / len(weights)


def histogram_probs(scores, edges, smoothing):
    counts = [0] * (len(edges) - 1)
    for v in scores:
        placed = len(counts) - 1
        for b in range(len(counts)):
            if v < edges[b + 1]:
                placed = b
                break
        counts[placed] += 1
    weights = [c + smoothing for c in counts]
    total = sum(weights)
    return [w / total for w in weights]


def kl(p, q):
    return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q))


def worst_case_kl(score_groups, bins, smoothing=1e-9):
    pooled = [s for group in score_groups for s in group]
    lo, hi = min(pooled), max(pooled)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = [lo + (hi - lo) * b / bins for b in range(bins + 1)]
    probs = [histogram_probs(g, edges, smoothing) for g in score_groups]
    best = None
    for i, p in enumerate(probs):
        for j, q in enumerate(probs):
            if i == j:
                continue
            d = kl(p, q)
            if best is None or d > best:
                best = d
    return best
