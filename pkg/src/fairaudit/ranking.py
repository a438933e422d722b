"""Representation and exposure fairness metrics over ranked lists.

Skew compares a subgroup's share of the top k against its population
share; attention weighs each list position by a sharply decreasing
visibility model and compares per-subgroup mean attention.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .classification import UNDEFINED, MetricResult, min_max_ratio
from .errors import ConfigError, ParseError, SchemaError, UsageError
from .subgroups import (
    SubgroupPartition,
    key_for_values,
    population_fractions,
    subgroup_label,
)

LOGARITHMIC = "log"
GEOMETRIC = "geometric"


@dataclass(frozen=True)
class RankedItem:
    item_id: str
    attributes: Mapping[str, str]


@dataclass(frozen=True)
class RankedList:
    """Items in rank order; position k is 1-based (items[k-1])."""

    items: tuple[RankedItem, ...]

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class AttentionModel:
    """Positional visibility weight, strictly decreasing in rank."""

    kind: str = LOGARITHMIC
    parameter: float = 0.5  # geometric success probability; unused for log

    def __post_init__(self):
        if self.kind not in (LOGARITHMIC, GEOMETRIC):
            raise ConfigError(f"unknown attention model {self.kind!r}")
        if self.kind == GEOMETRIC and not 0.0 < self.parameter < 1.0:
            raise ConfigError("geometric attention needs parameter in (0, 1)")


def attention_value(model: AttentionModel, k: int) -> float:
    """Attention at 1-based rank k."""
    if k < 1:
        raise UsageError("rank k must be >= 1")
    if model.kind == LOGARITHMIC:
        return 1.0 / math.log2(k + 1)
    return model.parameter * (1.0 - model.parameter) ** (k - 1)


def load_ranked_list(
    source,
    protected: Sequence[str],
    rank_column: str = "rank",
    id_column: str | None = None,
    delimiter: str = ",",
) -> RankedList:
    """Parse a ranked list from delimiter-separated text.

    The rank column must hold a 1-based, unique, contiguous position per
    row; rows may appear in any order and are sorted by rank.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_ranked_list(fh, protected, rank_column, id_column, delimiter)
    if isinstance(source.read(0), bytes):
        source = io.TextIOWrapper(source, encoding="utf-8", newline="")
    reader = csv.reader(source, delimiter=delimiter)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("row 1: empty input, no header") from None
    col = {name: i for i, name in enumerate(header)}
    for c in [rank_column, *protected] + ([id_column] if id_column else []):
        if c not in col:
            raise ConfigError(f"column {c!r} not found in header {header}")

    by_rank: dict[int, RankedItem] = {}
    for row_no, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ParseError(
                f"row {row_no}: expected {len(header)} fields, got {len(row)}"
            )
        cells = [c.strip() for c in row]
        try:
            rank = int(cells[col[rank_column]])
        except ValueError:
            raise ParseError(f"row {row_no}: rank is not an integer") from None
        if rank in by_rank:
            raise SchemaError(f"row {row_no}: duplicate rank {rank}")
        attrs = {name: cells[col[name]] for name in protected if cells[col[name]]}
        item_id = cells[col[id_column]] if id_column else str(rank)
        by_rank[rank] = RankedItem(item_id=item_id, attributes=attrs)

    n = len(by_rank)
    if sorted(by_rank) != list(range(1, n + 1)):
        raise SchemaError("rank column must be 1-based and contiguous")
    return RankedList(items=tuple(by_rank[k] for k in range(1, n + 1)))


def _item_labels(ranked: RankedList, partition: SubgroupPartition) -> list[str | None]:
    """Included-subgroup label per item; None for items matching none."""
    included = {sg.key: subgroup_label(sg) for sg in partition.subgroups}
    out = []
    for item in ranked.items:
        key = key_for_values(partition, item.attributes)
        out.append(included.get(key) if key is not None else None)
    return out


def skew_at_k(
    ranked: RankedList,
    partition: SubgroupPartition,
    subgroup,
    k: int,
    population: Mapping[str, float] | None = None,
) -> float | None:
    """Top-k representation of one subgroup relative to its population share.

    population overrides the partition-derived fractions when the candidate
    pool differs from the audited dataset. UNDEFINED when the subgroup's
    population fraction is 0.
    """
    if not 1 <= k <= len(ranked):
        raise UsageError(f"k={k} out of range 1..{len(ranked)}")
    label = subgroup_label(subgroup)
    fractions = dict(population) if population is not None else population_fractions(partition)
    pop = fractions.get(label, 0.0)
    if pop == 0.0:
        return UNDEFINED
    labels = _item_labels(ranked, partition)
    top = sum(1 for lab in labels[:k] if lab == label)
    return (top / k) / pop


def skew_ratio_at_k(
    ranked: RankedList,
    partition: SubgroupPartition,
    k: int,
    population: Mapping[str, float] | None = None,
    strict: bool = False,
) -> MetricResult:
    """Min/max ratio over per-subgroup skew at k."""
    values: dict[str, float] = {}
    notes: list[str] = []
    for sg in partition.subgroups:
        label = subgroup_label(sg)
        skew = skew_at_k(ranked, partition, sg, k, population)
        if skew is UNDEFINED:
            if strict:
                raise UsageError(
                    f"skew-ratio: zero population fraction for {label} (strict mode)"
                )
            notes.append(f"excluded {label}: zero population fraction")
        else:
            values[label] = skew
    if not values:
        return MetricResult(
            "skew-ratio", UNDEFINED, {}, notes=notes + ["all subgroups undefined"]
        )
    res = min_max_ratio(values, metric_id="skew-ratio", notes=notes)
    res.notes.append(f"k={k}")
    return res


def mean_attention(
    ranked: RankedList,
    partition: SubgroupPartition,
    subgroup,
    model: AttentionModel,
) -> float | None:
    """Average attention over the subgroup's list positions.

    Normalized by the subgroup's item count within the list, so the value
    reflects where its items sit, not how many it has. UNDEFINED when the
    subgroup has no items in the list.
    """
    label = subgroup_label(subgroup)
    labels = _item_labels(ranked, partition)
    total = 0.0
    count = 0
    for pos, lab in enumerate(labels, start=1):
        if lab == label:
            total += attention_value(model, pos)
            count += 1
    if count == 0:
        return UNDEFINED
    return total / count


def attention_ratio(
    ranked: RankedList,
    partition: SubgroupPartition,
    model: AttentionModel,
    strict: bool = False,
) -> MetricResult:
    """Min/max ratio over per-subgroup mean attention."""
    values: dict[str, float] = {}
    notes: list[str] = []
    for sg in partition.subgroups:
        label = subgroup_label(sg)
        ma = mean_attention(ranked, partition, sg, model)
        if ma is UNDEFINED:
            if strict:
                raise UsageError(
                    f"attention-ratio: no ranked items for {label} (strict mode)"
                )
            notes.append(f"excluded {label}: no items in ranked list")
        else:
            values[label] = ma
    if not values:
        return MetricResult(
            "attention-ratio", UNDEFINED, {}, notes=notes + ["all subgroups undefined"]
        )
    res = min_max_ratio(values, metric_id="attention-ratio", notes=notes)
    res.notes.append(f"attention={model.kind}" + (
        f", p={model.parameter:g}" if model.kind == GEOMETRIC else ""
    ))
    return res
