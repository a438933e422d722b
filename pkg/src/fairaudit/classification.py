"""Worst-case classification fairness metrics over a subgroup partition.

All ratio metrics share one kernel: evaluate a per-subgroup statistic,
then divide the minimum by the maximum. A ratio of 1 means no disparity;
the further below 1, the worse the most-disadvantaged subgroup fares
relative to the best-off one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .data_model import Dataset, require_fields
from .errors import ConfigError, UsageError
from .subgroups import Subgroup, SubgroupPartition, subgroup_label

#: Distinguished value for statistics with an empty conditioning set.
UNDEFINED = None


class RateKind(enum.Enum):
    PASS_RATE = "pass_rate"
    TPR = "tpr"
    TNR = "tnr"
    FPR = "fpr"
    FNR = "fnr"
    PREDICTED_CLASS_RATE = "predicted_class_rate"


@dataclass
class MetricResult:
    """A metric value with its per-subgroup breakdown.

    value is None (UNDEFINED) when no subgroup had a defined statistic.
    min_subgroup / max_subgroup identify the achieving subgroups (for
    pairwise metrics: the numerator / denominator of the achieving pair).
    """

    metric_id: str
    value: float | None
    per_subgroup: dict[str, float]
    min_subgroup: str | None = None
    max_subgroup: str | None = None
    notes: list[str] = field(default_factory=list)


def min_max_ratio(
    values: Mapping[str, float],
    metric_id: str = "min_max_ratio",
    notes: Sequence[str] = (),
) -> MetricResult:
    """Minimum over maximum of the per-subgroup statistics.

    Degenerate cases: a single subgroup, or all statistics exactly zero,
    count as no disparity (ratio 1) and are flagged in notes. Ties in the
    min/max selection resolve to the lexicographically smallest label.
    """
    if not values:
        raise UsageError("min_max_ratio: empty values map")
    notes = list(notes)
    values = {label: float(v) for label, v in values.items()}
    labels = sorted(values)
    if len(labels) == 1:
        only = labels[0]
        notes.append("single subgroup")
        return MetricResult(metric_id, 1.0, values, only, only, notes)
    lo = hi = labels[0]
    for label in labels[1:]:
        if values[label] < values[lo]:
            lo = label
        if values[label] > values[hi]:
            hi = label
    vmin, vmax = values[lo], values[hi]
    if vmax == 0.0:
        notes.append("degenerate: all-zero")
        return MetricResult(metric_id, 1.0, values, lo, hi, notes)
    return MetricResult(metric_id, vmin / vmax, values, lo, hi, notes)


def _encode_binary(labels: Sequence[str | None], positive: str) -> np.ndarray:
    out = np.empty(len(labels), dtype=np.int8)
    for i, lab in enumerate(labels):
        out[i] = -1 if lab is None else (1 if lab == positive else 0)
    return out


def _binary_counts(
    dataset: Dataset, partition: SubgroupPartition, positive_label: str
) -> np.ndarray:
    pred = _encode_binary([r.predicted_label for r in dataset.records], positive_label)
    true = _encode_binary([r.true_label for r in dataset.records], positive_label)
    gid = partition.group_id_array(len(dataset))
    return kernels.group_binary_counts(gid, len(partition.subgroups), pred, true)


def _included_indices(partition: SubgroupPartition) -> list[int]:
    out: list[int] = []
    for sg in partition.subgroups:
        out.extend(sg.member_indices)
    return sorted(out)


def _check_included(partition: SubgroupPartition) -> None:
    if not partition.subgroups:
        raise UsageError("partition has no included subgroups")


def _rate_from_counts(row: np.ndarray, kind: RateKind):
    n = row[kernels.COL_N]
    pos = row[kernels.COL_TRUE_POS]
    neg = n - row[kernels.COL_TRUE_MISSING] - pos
    if kind is RateKind.PASS_RATE:
        return row[kernels.COL_PRED_POS] / n if n else UNDEFINED
    if kind in (RateKind.TPR, RateKind.FNR):
        if pos == 0:
            return UNDEFINED
        tpr = row[kernels.COL_TP] / pos
        return tpr if kind is RateKind.TPR else 1.0 - tpr
    if kind in (RateKind.TNR, RateKind.FPR):
        if neg == 0:
            return UNDEFINED
        tnr = row[kernels.COL_TN] / neg
        return tnr if kind is RateKind.TNR else 1.0 - tnr
    raise UsageError(f"unsupported rate kind {kind!r} here")


_KIND_FIELDS = {
    RateKind.PASS_RATE: ("predicted",),
    RateKind.TPR: ("predicted", "true"),
    RateKind.TNR: ("predicted", "true"),
    RateKind.FPR: ("predicted", "true"),
    RateKind.FNR: ("predicted", "true"),
    RateKind.PREDICTED_CLASS_RATE: ("predicted",),
}


def subgroup_rate(
    dataset: Dataset,
    subgroup: Subgroup,
    kind: RateKind,
    positive_label: str,
    class_label: str | None = None,
) -> float | None:
    """One subgroup's rate statistic; UNDEFINED on an empty conditioning set."""
    if not subgroup.member_indices:
        raise UsageError("subgroup_rate: empty subgroup")
    require_fields(dataset, subgroup.member_indices, _KIND_FIELDS[kind])
    if kind is RateKind.PREDICTED_CLASS_RATE:
        if class_label is None:
            raise UsageError("PREDICTED_CLASS_RATE requires class_label")
        hits = sum(
            1
            for i in subgroup.member_indices
            if dataset.records[i].predicted_label == class_label
        )
        return hits / len(subgroup.member_indices)
    n = pred_pos = pos = neg = tp = tn = 0
    for i in subgroup.member_indices:
        rec = dataset.records[i]
        n += 1
        p = rec.predicted_label == positive_label
        if p:
            pred_pos += 1
        if kind is not RateKind.PASS_RATE:
            if rec.true_label == positive_label:
                pos += 1
                if p:
                    tp += 1
            else:
                neg += 1
                if not p:
                    tn += 1
    if kind is RateKind.PASS_RATE:
        return pred_pos / n
    if kind in (RateKind.TPR, RateKind.FNR):
        if pos == 0:
            return UNDEFINED
        return tp / pos if kind is RateKind.TPR else 1.0 - tp / pos
    if neg == 0:
        return UNDEFINED
    return tn / neg if kind is RateKind.TNR else 1.0 - tn / neg


def _ratio_over_rates(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    kind: RateKind,
    metric_id: str,
    strict: bool = False,
) -> MetricResult:
    _check_included(partition)
    require_fields(dataset, _included_indices(partition), _KIND_FIELDS[kind])
    counts = _binary_counts(dataset, partition, positive_label)
    rates: dict[str, float] = {}
    notes: list[str] = []
    for g, sg in enumerate(partition.subgroups):
        label = subgroup_label(sg)
        rate = _rate_from_counts(counts[g], kind)
        if rate is UNDEFINED:
            if strict:
                raise UsageError(
                    f"{metric_id}: statistic undefined for subgroup {label} (strict mode)"
                )
            notes.append(f"excluded {label}: undefined {kind.value}")
        else:
            rates[label] = rate
    if not rates:
        return MetricResult(
            metric_id, UNDEFINED, {}, notes=notes + ["all subgroups undefined"]
        )
    return min_max_ratio(rates, metric_id=metric_id, notes=notes)


def demographic_parity_ratio(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    strict: bool = False,
) -> MetricResult:
    """Min/max ratio of per-subgroup positive-outcome rates."""
    return _ratio_over_rates(
        dataset, partition, positive_label, RateKind.PASS_RATE, "dpr", strict
    )


def disparate_impact(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    strict: bool = False,
) -> MetricResult:
    """Minimum pass-rate ratio over all ordered subgroup pairs.

    Equals the demographic parity ratio whenever every pass rate is
    positive; pairs with a zero denominator and nonzero numerator are
    skipped with a note. Compare against 0.8 for the four-fifths rule.
    """
    _check_included(partition)
    if len(partition.subgroups) < 2:
        raise UsageError("disparate_impact needs at least 2 included subgroups")
    require_fields(dataset, _included_indices(partition), ("predicted",))
    counts = _binary_counts(dataset, partition, positive_label)
    rates = {
        subgroup_label(sg): float(
            counts[g, kernels.COL_PRED_POS] / counts[g, kernels.COL_N]
        )
        for g, sg in enumerate(partition.subgroups)
    }
    labels = sorted(rates)
    notes: list[str] = []
    best = None
    best_pair = (None, None)
    for i in labels:
        for j in labels:
            if i == j:
                continue
            if rates[j] == 0.0:
                if rates[i] != 0.0:
                    notes.append(f"skipped pair ({i})/({j}): zero denominator")
                continue
            r = rates[i] / rates[j]
            if best is None or r < best:
                best = r
                best_pair = (i, j)
    if best is None:
        notes.append("degenerate: all-zero")
        return MetricResult("di", 1.0, rates, labels[0], labels[0], notes)
    return MetricResult("di", best, rates, best_pair[0], best_pair[1], notes)


LegitimateFilter = Sequence[tuple[str, bool]]


def conditional_statistical_parity_ratio(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    legitimate_filter: LegitimateFilter | Callable[[Mapping[str, bool]], bool],
    strict: bool = False,
) -> MetricResult:
    """Demographic parity ratio restricted to records passing the filter.

    A declarative filter is a conjunction of (flag, wanted) tests over the
    dataset's legitimate flags; a callable receives each record's flag map.
    """
    _check_included(partition)
    if callable(legitimate_filter):
        predicate = legitimate_filter
    else:
        clauses = list(legitimate_filter)
        for flag, _ in clauses:
            if flag not in dataset.legitimate_names:
                raise ConfigError(f"unknown legitimate flag {flag!r}")
        referenced = [f"legitimate:{flag}" for flag, _ in clauses]
        require_fields(dataset, _included_indices(partition), referenced)

        def predicate(flags, _clauses=clauses):
            return all(flags.get(flag) == wanted for flag, wanted in _clauses)

    require_fields(dataset, _included_indices(partition), ("predicted",))
    keep = np.array(
        [predicate(rec.legitimate_flags) for rec in dataset.records], dtype=bool
    )
    gid = partition.group_id_array(len(dataset))
    gid[~keep] = -1
    pred = _encode_binary([r.predicted_label for r in dataset.records], positive_label)
    true = np.full(len(dataset), -1, dtype=np.int8)
    counts = kernels.group_binary_counts(gid, len(partition.subgroups), pred, true)

    rates: dict[str, float] = {}
    notes: list[str] = []
    for g, sg in enumerate(partition.subgroups):
        label = subgroup_label(sg)
        n = counts[g, kernels.COL_N]
        if n == 0:
            if strict:
                raise UsageError(
                    f"cspr: subgroup {label} emptied by legitimate filter (strict mode)"
                )
            notes.append(f"excluded {label}: emptied by legitimate filter")
        else:
            rates[label] = counts[g, kernels.COL_PRED_POS] / n
    if not rates:
        return MetricResult(
            "cspr", UNDEFINED, {}, notes=notes + ["empty conditional population"]
        )
    return min_max_ratio(rates, metric_id="cspr", notes=notes)


def equal_opportunity_ratio(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    strict: bool = False,
) -> MetricResult:
    """Min/max ratio of per-subgroup true positive rates."""
    return _ratio_over_rates(
        dataset, partition, positive_label, RateKind.TPR, "eoppr", strict
    )


_PARITY_IDS = {
    RateKind.PASS_RATE: "dpr",
    RateKind.TPR: "tpr-parity",
    RateKind.TNR: "tnr-parity",
    RateKind.FPR: "fpr-parity",
    RateKind.FNR: "fnr-parity",
}


def rate_parity_ratio(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    kind: RateKind,
    strict: bool = False,
) -> MetricResult:
    """Min/max ratio for any member of the TPR/TNR/FPR/FNR parity family."""
    if kind not in _PARITY_IDS:
        raise UsageError(f"rate_parity_ratio does not support {kind!r}")
    return _ratio_over_rates(
        dataset, partition, positive_label, kind, _PARITY_IDS[kind], strict
    )


def equalized_odds_ratio(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    strict: bool = False,
) -> MetricResult:
    """Worst of the TPR-parity and FPR-parity min/max ratios."""
    tpr = _ratio_over_rates(
        dataset, partition, positive_label, RateKind.TPR, "eodds", strict
    )
    fpr = _ratio_over_rates(
        dataset, partition, positive_label, RateKind.FPR, "eodds", strict
    )
    per_subgroup: dict[str, float] = {}
    for label, v in tpr.per_subgroup.items():
        per_subgroup[f"tpr:{label}"] = v
    for label, v in fpr.per_subgroup.items():
        per_subgroup[f"fpr:{label}"] = v
    candidates = [
        ("TPR family", tpr),
        ("FPR family", fpr),
    ]
    defined = [(name, m) for name, m in candidates if m.value is not UNDEFINED]
    notes = [n for _, m in candidates for n in m.notes]
    if not defined:
        return MetricResult(
            "eodds", UNDEFINED, per_subgroup, notes=notes + ["all subgroups undefined"]
        )
    # stable preference for the TPR family on exact ties
    name, worst = min(defined, key=lambda nm: nm[1].value)
    notes.append(name)
    return MetricResult(
        "eodds", worst.value, per_subgroup, worst.min_subgroup, worst.max_subgroup, notes
    )


def group_benefit_ratio_per_subgroup(
    dataset: Dataset, subgroup: Subgroup, positive_label: str
) -> float | None:
    """Predicted pass rate over actual pass rate; UNDEFINED when actual is 0."""
    if not subgroup.member_indices:
        raise UsageError("empty subgroup")
    require_fields(dataset, subgroup.member_indices, ("predicted", "true"))
    n = len(subgroup.member_indices)
    pred = sum(
        1
        for i in subgroup.member_indices
        if dataset.records[i].predicted_label == positive_label
    )
    actual = sum(
        1
        for i in subgroup.member_indices
        if dataset.records[i].true_label == positive_label
    )
    if actual == 0:
        return UNDEFINED
    return (pred / n) / (actual / n)


def group_benefit_ratio_intersectional(
    dataset: Dataset,
    partition: SubgroupPartition,
    positive_label: str,
    strict: bool = False,
) -> MetricResult:
    """Min/max ratio of per-subgroup group-benefit ratios."""
    _check_included(partition)
    require_fields(dataset, _included_indices(partition), ("predicted", "true"))
    counts = _binary_counts(dataset, partition, positive_label)
    values: dict[str, float] = {}
    notes: list[str] = []
    for g, sg in enumerate(partition.subgroups):
        label = subgroup_label(sg)
        actual = counts[g, kernels.COL_TRUE_POS]
        if actual == 0:
            if strict:
                raise UsageError(
                    f"gbr: undefined for subgroup {label} (strict mode)"
                )
            notes.append(f"excluded {label}: zero actual pass rate")
        else:
            values[label] = counts[g, kernels.COL_PRED_POS] / actual
    if not values:
        return MetricResult(
            "gbr", UNDEFINED, {}, notes=notes + ["all subgroups undefined"]
        )
    return min_max_ratio(values, metric_id="gbr", notes=notes)


def multiclass_equalized_odds_ratio(
    dataset: Dataset, partition: SubgroupPartition, strict: bool = False
) -> MetricResult:
    """Worst per-class min/max ratio of predicted-class rates.

    For each possible output class, take the min/max ratio of the rate at
    which subgroups receive that class; report the minimum across classes.
    """
    _check_included(partition)
    if len(dataset.class_set) < 2:
        raise UsageError("multiclass metric needs at least 2 classes")
    require_fields(dataset, _included_indices(partition), ("predicted",))
    code = {c: k for k, c in enumerate(dataset.class_set)}
    classes = np.array(
        [code.get(r.predicted_label, -1) for r in dataset.records], dtype=np.int64
    )
    gid = partition.group_id_array(len(dataset))
    n_groups = len(partition.subgroups)
    counts = kernels.group_class_counts(gid, n_groups, classes, len(dataset.class_set))
    sizes = np.array([len(sg.member_indices) for sg in partition.subgroups])

    labels = [subgroup_label(sg) for sg in partition.subgroups]
    best: MetricResult | None = None
    best_class = None
    notes: list[str] = []
    for k, cls in enumerate(dataset.class_set):
        rates = {labels[g]: counts[g, k] / sizes[g] for g in range(n_groups)}
        res = min_max_ratio(rates, metric_id="meoddr")
        if "degenerate: all-zero" in res.notes:
            notes.append(f"class {cls!r}: no predictions, ratio 1 by convention")
        if best is None or res.value < best.value:
            best = res
            best_class = cls
    notes.append(f"achieving class: {best_class!r}")
    return MetricResult(
        "meoddr", best.value, best.per_subgroup, best.min_subgroup, best.max_subgroup,
        notes + [n for n in best.notes],
    )
