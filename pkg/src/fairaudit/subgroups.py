"""Cartesian-product subgroup partitioning over protected attributes.

One candidate subgroup exists per element of the Cartesian product of the
selected attributes' domains. Candidates below the support threshold are
moved to the excluded list (never dropped silently); records missing any
selected attribute are tallied as unassigned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data_model import Dataset
from .errors import ConfigError


@dataclass(frozen=True)
class Subgroup:
    """An intersection of one category per selected attribute."""

    key: tuple[tuple[str, str], ...]  # (attribute, label) in partition order
    member_indices: tuple[int, ...]

    @property
    def key_map(self) -> dict[str, str]:
        return dict(self.key)


@dataclass(frozen=True)
class ExcludedSubgroup:
    key: tuple[tuple[str, str], ...]
    reason: str  # "empty" or "below_support"
    member_indices: tuple[int, ...]


@dataclass(frozen=True)
class SubgroupPartition:
    subgroups: tuple[Subgroup, ...]
    attribute_names: tuple[str, ...]
    total_candidates: int
    excluded: tuple[ExcludedSubgroup, ...]
    unassigned: tuple[int, ...]

    def labels(self) -> list[str]:
        return [subgroup_label(sg) for sg in self.subgroups]

    def group_id_array(self, n_records: int) -> np.ndarray:
        """Per-record included-subgroup index, -1 for excluded/unassigned."""
        ids = np.full(n_records, -1, dtype=np.int64)
        for g, sg in enumerate(self.subgroups):
            ids[list(sg.member_indices)] = g
        return ids


def subgroup_label(subgroup: Subgroup | ExcludedSubgroup) -> str:
    """Deterministic report label: name=value pairs joined by the times sign."""
    return "×".join(f"{name}={value}" for name, value in subgroup.key)


def key_label(key: tuple[tuple[str, str], ...]) -> str:
    return "×".join(f"{name}={value}" for name, value in key)


def build_partition(
    dataset: Dataset,
    attribute_names: Sequence[str],
    min_support: int = 1,
) -> SubgroupPartition:
    """Partition the dataset's records into Cartesian-product subgroups.

    Candidate enumeration order is lexicographic over (attribute order,
    domain order), so reports are byte-for-byte reproducible. The effective
    support threshold is max(min_support, 1): empty candidates are always
    excluded (reason "empty"), candidates with fewer members than a raised
    threshold get reason "below_support".
    """
    if not attribute_names:
        raise ConfigError("attribute_names must be nonempty")
    if min_support < 0:
        raise ConfigError("min_support must be nonnegative")
    names = tuple(attribute_names)
    schemas = [dataset.attribute(name) for name in names]

    domains = [s.domain for s in schemas]
    total_candidates = 1
    for d in domains:
        total_candidates *= len(d)

    members: dict[tuple[str, ...], list[int]] = {}
    unassigned: list[int] = []
    for i, rec in enumerate(dataset.records):
        values = tuple(rec.attributes.get(name, "") for name in names)
        if "" in values:
            unassigned.append(i)
        else:
            members.setdefault(values, []).append(i)

    threshold = max(min_support, 1)
    subgroups: list[Subgroup] = []
    excluded: list[ExcludedSubgroup] = []
    for combo in itertools.product(*domains):
        key = tuple(zip(names, combo))
        idx = tuple(members.get(tuple(combo), ()))
        if len(idx) >= threshold:
            subgroups.append(Subgroup(key=key, member_indices=idx))
        else:
            reason = "empty" if not idx else "below_support"
            excluded.append(ExcludedSubgroup(key=key, reason=reason, member_indices=idx))

    return SubgroupPartition(
        subgroups=tuple(subgroups),
        attribute_names=names,
        total_candidates=total_candidates,
        excluded=tuple(excluded),
        unassigned=tuple(unassigned),
    )


def population_fractions(partition: SubgroupPartition) -> dict[str, float]:
    """Fraction of assigned records per included subgroup.

    The denominator counts every assigned record, including members of
    excluded below-support candidates, so fractions reflect the real
    population even when small groups are excluded from ratios.
    """
    total = sum(len(sg.member_indices) for sg in partition.subgroups)
    total += sum(len(ex.member_indices) for ex in partition.excluded)
    if total == 0:
        return {subgroup_label(sg): 0.0 for sg in partition.subgroups}
    return {
        subgroup_label(sg): len(sg.member_indices) / total
        for sg in partition.subgroups
    }


def key_for_values(
    partition: SubgroupPartition, values: Mapping[str, str]
) -> tuple[tuple[str, str], ...] | None:
    """Build a partition-ordered key from attribute values; None if incomplete."""
    out = []
    for name in partition.attribute_names:
        v = values.get(name)
        if not v:
            return None
        out.append((name, v))
    return tuple(out)
