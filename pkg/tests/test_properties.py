"""Property-based invariants and randomized oracle equivalence.

Two layers: hypothesis strategies exercising structural invariants, and a
seeded loop over many small random datasets comparing every metric against
the brute-force reimplementation in tests/oracle.py.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairaudit.classification import (
    RateKind,
    demographic_parity_ratio,
    disparate_impact,
    equal_opportunity_ratio,
    equalized_odds_ratio,
    group_benefit_ratio_intersectional,
    multiclass_equalized_odds_ratio,
    rate_parity_ratio,
)
from fairaudit.distribution import worst_case_kl
from fairaudit.subgroups import build_partition, subgroup_label

from . import oracle
from .util import make_dataset

ATTRS = ["a1", "a2", "a3"]
DOMAINS = {"a1": ["x", "y", "z"], "a2": ["p", "q"], "a3": ["m", "n", "o"]}


def random_rows(rng, n_attrs=None, n_rows=None, missing_rate=0.0, classes=("0", "1")):
    n_attrs = n_attrs or rng.randrange(1, 4)
    attrs = ATTRS[:n_attrs]
    n_rows = n_rows or rng.randrange(1, 40)
    rows = []
    for _ in range(n_rows):
        row = {}
        for a in attrs:
            if rng.random() >= missing_rate:
                row[a] = rng.choice(DOMAINS[a])
        row["pred"] = rng.choice(classes)
        row["true"] = rng.choice(classes)
        rows.append(row)
    return rows, attrs


def build(rows, attrs):
    ds = make_dataset(rows, attrs)
    return ds, build_partition(ds, attrs)


rows_strategy = st.lists(
    st.fixed_dictionaries(
        {
            "a1": st.sampled_from(DOMAINS["a1"]),
            "a2": st.sampled_from(DOMAINS["a2"]),
            "pred": st.sampled_from(["0", "1"]),
            "true": st.sampled_from(["0", "1"]),
        }
    ),
    min_size=1,
    max_size=40,
)


class TestPartitionInvariants:
    @given(rows_strategy)
    @settings(max_examples=100, deadline=None)
    def test_disjoint_and_covering(self, rows):
        ds, part = build(rows, ["a1", "a2"])
        seen = []
        for sg in part.subgroups:
            seen.extend(sg.member_indices)
        for ex in part.excluded:
            seen.extend(ex.member_indices)
        seen.extend(part.unassigned)
        assert sorted(seen) == list(range(len(rows)))
        assert len(seen) == len(set(seen))

    @given(rows_strategy)
    @settings(max_examples=50, deadline=None)
    def test_membership_matches_attribute_values(self, rows):
        ds, part = build(rows, ["a1", "a2"])
        for sg in part.subgroups:
            for i in sg.member_indices:
                assert tuple((a, rows[i][a]) for a in ("a1", "a2")) == sg.key


class TestMetricRange:
    @given(rows_strategy)
    @settings(max_examples=100, deadline=None)
    def test_ratios_stay_in_unit_interval(self, rows):
        ds, part = build(rows, ["a1", "a2"])
        for fn in (
            demographic_parity_ratio,
            equal_opportunity_ratio,
            equalized_odds_ratio,
            group_benefit_ratio_intersectional,
        ):
            value = fn(ds, part, "1").value
            if value is not None:
                assert 0.0 <= value <= 1.0

    @given(rows_strategy)
    @settings(max_examples=50, deadline=None)
    def test_duplication_invariance(self, rows):
        ds1, p1 = build(rows, ["a1", "a2"])
        ds2, p2 = build(rows * 3, ["a1", "a2"])
        assert (
            demographic_parity_ratio(ds1, p1, "1").value
            == demographic_parity_ratio(ds2, p2, "1").value
        )

    @given(rows_strategy)
    @settings(max_examples=50, deadline=None)
    def test_di_matches_dpr_when_all_rates_positive(self, rows):
        ds, part = build(rows, ["a1", "a2"])
        if len(part.subgroups) < 2:
            return
        dpr = demographic_parity_ratio(ds, part, "1")
        if any(v == 0.0 for v in dpr.per_subgroup.values()):
            return
        assert disparate_impact(ds, part, "1").value == dpr.value

    @given(rows_strategy)
    @settings(max_examples=50, deadline=None)
    def test_label_swap_symmetry(self, rows):
        """Swapping the binary labels swaps TPR-parity with TNR-parity."""
        swap = {"0": "1", "1": "0"}
        flipped = [
            {**row, "pred": swap[row["pred"]], "true": swap[row["true"]]}
            for row in rows
        ]
        ds1, p1 = build(rows, ["a1", "a2"])
        ds2, p2 = build(flipped, ["a1", "a2"])
        tpr = rate_parity_ratio(ds1, p1, "1", RateKind.TPR).value
        tnr = rate_parity_ratio(ds2, p2, "1", RateKind.TNR).value
        assert tpr == tnr


def spread_rows(rng):
    rows, attrs = random_rows(rng, missing_rate=0.1)
    return rows, attrs


@pytest.mark.parametrize("block", range(10))
def test_oracle_equivalence_ratio_metrics(block):
    """100 random datasets per block, each metric checked against the oracle."""
    rng = random.Random(1000 + block)
    for _ in range(100):
        rows, attrs = spread_rows(rng)
        ds, part = build(rows, attrs)
        if not part.subgroups:
            continue
        cases = [
            (demographic_parity_ratio, "pass"),
            (equal_opportunity_ratio, "tpr"),
            (group_benefit_ratio_intersectional, "gbr"),
        ]
        for fn, stat in cases:
            got = fn(ds, part, "1").value
            want = oracle.ratio_metric(rows, attrs, stat, "1")
            if want is None:
                assert got is None
            else:
                assert got == pytest.approx(want, abs=1e-12)
        for kind, stat in (
            (RateKind.TPR, "tpr"),
            (RateKind.TNR, "tnr"),
            (RateKind.FPR, "fpr"),
            (RateKind.FNR, "fnr"),
        ):
            got = rate_parity_ratio(ds, part, "1", kind).value
            want = oracle.ratio_metric(rows, attrs, stat, "1")
            if want is None:
                assert got is None
            else:
                assert got == pytest.approx(want, abs=1e-12)
        got = equalized_odds_ratio(ds, part, "1").value
        want = oracle.equalized_odds(rows, attrs, "1")
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-12)
        if len(part.subgroups) >= 2:
            got = disparate_impact(ds, part, "1").value
            want = oracle.disparate_impact(rows, attrs, "1")
            assert got == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("seed", range(30))
def test_oracle_equivalence_multiclass(seed):
    rng = random.Random(2000 + seed)
    classes = ["a", "b", "c"][: rng.randrange(2, 4)]
    rows, attrs = random_rows(rng, classes=classes)
    ds, part = build(rows, attrs)
    if not part.subgroups:
        return
    got = multiclass_equalized_odds_ratio(ds, part).value
    observed = sorted({row["pred"] for row in rows} | {row["true"] for row in rows})
    want = oracle.multiclass_eoddr(rows, attrs, observed)
    assert got == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_oracle_equivalence_worst_case_kl(seed):
    rng = random.Random(3000 + seed)
    attrs = ["a1"]
    rows = []
    for _ in range(rng.randrange(4, 60)):
        rows.append({"a1": rng.choice(DOMAINS["a1"]), "score": rng.gauss(0, 1)})
    ds, part = build(rows, attrs)
    if len(part.subgroups) < 2:
        return
    bins = rng.choice([4, 16, 64])
    got = worst_case_kl(ds, part, bins=bins).value
    groups = [
        [rows[i]["score"] for i in sg.member_indices] for sg in part.subgroups
    ]
    want = oracle.worst_case_kl(groups, bins)
    assert got == pytest.approx(want, rel=1e-9)


def test_many_small_random_datasets_never_crash_and_stay_bounded():
    """At least 1000 random small datasets audited without error."""
    rng = random.Random(4242)
    audited = 0
    while audited < 1000:
        rows, attrs = random_rows(rng, missing_rate=0.15)
        ds, part = build(rows, attrs)
        if not part.subgroups:
            continue
        audited += 1
        for fn in (
            demographic_parity_ratio,
            equal_opportunity_ratio,
            equalized_odds_ratio,
            group_benefit_ratio_intersectional,
        ):
            res = fn(ds, part, "1")
            if res.value is not None:
                assert 0.0 <= res.value <= 1.0
            dpr_oracle = oracle.ratio_metric(rows, attrs, "pass", "1")
        got = demographic_parity_ratio(ds, part, "1").value
        assert got == pytest.approx(dpr_oracle, abs=1e-12)
    assert audited == 1000
