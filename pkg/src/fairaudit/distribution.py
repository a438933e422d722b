"""Per-subgroup output-distribution estimation and worst-case divergence.

Continuous model outputs are discretized on one shared equal-width grid
spanning the pooled score range, with additive smoothing so every bin has
positive mass and pairwise KL divergence stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .classification import MetricResult
from .data_model import Dataset, require_fields
from .errors import UsageError
from .subgroups import SubgroupPartition, subgroup_label

DEFAULT_BINS = 64
DEFAULT_SMOOTHING = 1e-9


@dataclass(frozen=True)
class DistributionEstimate:
    """Discretized probability distribution of one subgroup's scores."""

    bin_edges: np.ndarray
    probabilities: np.ndarray
    sample_count: int


def make_shared_edges(scores: np.ndarray, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Equal-width edges over the pooled score range.

    A degenerate range (all scores identical) is widened by 0.5 per side
    so the grid stays strictly increasing.
    """
    if bins < 1:
        raise UsageError("bins must be >= 1")
    lo = float(np.min(scores))
    hi = float(np.max(scores))
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    return np.linspace(lo, hi, bins + 1)


def estimate_distribution(
    scores, bin_edges: np.ndarray, smoothing: float = DEFAULT_SMOOTHING
) -> DistributionEstimate:
    """Smoothed histogram estimate; out-of-range scores clamp to edge bins."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise UsageError("estimate_distribution: empty scores")
    edges = np.asarray(bin_edges, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise UsageError("bin_edges must be strictly increasing with >= 2 entries")
    counts = kernels.histogram_counts(scores, edges)
    weights = counts.astype(np.float64) + smoothing
    return DistributionEstimate(
        bin_edges=edges,
        probabilities=weights / weights.sum(),
        sample_count=int(scores.size),
    )


def _check_comparable(p: DistributionEstimate, q: DistributionEstimate) -> None:
    if p.bin_edges.shape != q.bin_edges.shape or not np.array_equal(
        p.bin_edges, q.bin_edges
    ):
        raise UsageError("distributions do not share bin edges")


def kl_divergence(p: DistributionEstimate, q: DistributionEstimate) -> float:
    """Discrete KL divergence in nats; nonnegative for normalized inputs."""
    _check_comparable(p, q)
    return float(
        np.sum(p.probabilities * (np.log(p.probabilities) - np.log(q.probabilities)))
    )


def total_variation(p: DistributionEstimate, q: DistributionEstimate) -> float:
    """Total variation distance, the one alternate divergence offered."""
    _check_comparable(p, q)
    return 0.5 * float(np.sum(np.abs(p.probabilities - q.probabilities)))


def worst_case_kl(
    dataset: Dataset,
    partition: SubgroupPartition,
    bins: int = DEFAULT_BINS,
    divergence: str = "kl",
    smoothing: float = DEFAULT_SMOOTHING,
) -> MetricResult:
    """Maximum pairwise divergence between subgroup score distributions.

    All ordered pairs (i, j), i != j, are compared, so both directions of
    the asymmetric KL divergence enter the maximum. A value near 0 means
    every subgroup produces a similar output distribution. The result has
    no upper bound of 1 and carries no four-fifths verdict.
    """
    if divergence not in ("kl", "tv"):
        raise UsageError(f"unknown divergence {divergence!r}")
    if len(partition.subgroups) < 2:
        raise UsageError("worst_case_kl needs at least 2 included subgroups")

    indices: list[int] = []
    for sg in partition.subgroups:
        indices.extend(sg.member_indices)
    require_fields(dataset, sorted(indices), ("score",))

    all_scores = np.array(
        [dataset.records[i].score for i in indices], dtype=np.float64
    )
    edges = make_shared_edges(all_scores, bins)
    labels = []
    probs = np.empty((len(partition.subgroups), bins), dtype=np.float64)
    counts = []
    for g, sg in enumerate(partition.subgroups):
        est = estimate_distribution(
            [dataset.records[i].score for i in sg.member_indices], edges, smoothing
        )
        probs[g] = est.probabilities
        labels.append(subgroup_label(sg))
        counts.append(est.sample_count)

    kind = kernels.DIV_KL if divergence == "kl" else kernels.DIV_TV
    matrix = kernels.pairwise_divergence_matrix(probs, kind)
    per_pair = {}
    value = None
    bi = bj = 0
    for i, li in enumerate(labels):
        for j, lj in enumerate(labels):
            if i != j:
                per_pair[f"{li}||{lj}"] = float(matrix[i, j])
                if value is None or matrix[i, j] > value:
                    value = float(matrix[i, j])
                    bi, bj = i, j
    metric_id = "wkl" if divergence == "kl" else "wtv"
    return MetricResult(
        metric_id=metric_id,
        value=float(value),
        per_subgroup=per_pair,
        min_subgroup=labels[bi],
        max_subgroup=labels[bj],
        notes=[
            f"achieving pair: {labels[bi]} || {labels[bj]}",
            f"bins={bins}, smoothing={smoothing:g}, divergence={divergence}",
        ],
    )
