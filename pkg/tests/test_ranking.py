import io
import math

import pytest

from fairaudit.errors import ConfigError, ParseError, SchemaError, UsageError
from fairaudit.ranking import (
    GEOMETRIC,
    LOGARITHMIC,
    AttentionModel,
    RankedItem,
    RankedList,
    attention_ratio,
    attention_value,
    load_ranked_list,
    mean_attention,
    skew_at_k,
    skew_ratio_at_k,
)
from fairaudit.subgroups import build_partition, subgroup_label
from .util import make_dataset

GEO = AttentionModel(kind=GEOMETRIC, parameter=0.5)
LOG = AttentionModel(kind=LOGARITHMIC)


def population(counts):
    rows = []
    for g, n in counts.items():
        rows += [{"g": g}] * n
    ds = make_dataset(rows, ["g"])
    return ds, build_partition(ds, ["g"])


def ranked(sequence):
    return RankedList(
        items=tuple(
            RankedItem(item_id=str(i), attributes={"g": g})
            for i, g in enumerate(sequence, 1)
        )
    )


def by_label(partition):
    return {subgroup_label(sg): sg for sg in partition.subgroups}


class TestAttentionValue:
    def test_logarithmic(self):
        assert attention_value(LOG, 1) == 1.0
        assert attention_value(LOG, 3) == 0.5

    def test_geometric(self):
        assert [attention_value(GEO, k) for k in range(1, 5)] == [
            0.5, 0.25, 0.125, 0.0625,
        ]

    def test_strictly_decreasing(self):
        for model in (LOG, GEO, AttentionModel(kind=GEOMETRIC, parameter=0.2)):
            values = [attention_value(model, k) for k in range(1, 30)]
            assert all(a > b > 0 for a, b in zip(values, values[1:]))

    def test_geometric_mass_converges_to_one(self):
        total = sum(attention_value(GEO, k) for k in range(1, 200))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_invalid_rank(self):
        with pytest.raises(UsageError):
            attention_value(LOG, 0)

    def test_invalid_model(self):
        with pytest.raises(ConfigError):
            AttentionModel(kind="uniform")
        with pytest.raises(ConfigError):
            AttentionModel(kind=GEOMETRIC, parameter=1.5)


class TestSkew:
    def test_proportional_representation(self):
        ds, part = population({"A": 50, "B": 50})
        lst = ranked(["A", "B"] * 5)
        groups = by_label(part)
        assert skew_at_k(lst, part, groups["g=A"], 10) == pytest.approx(1.0)
        assert skew_at_k(lst, part, groups["g=B"], 10) == pytest.approx(1.0)

    def test_seventy_thirty_population(self):
        ds, part = population({"A": 70, "B": 30})
        lst = ranked(["A"] * 9 + ["B"])
        groups = by_label(part)
        assert skew_at_k(lst, part, groups["g=A"], 10) == pytest.approx(0.9 / 0.7)
        assert skew_at_k(lst, part, groups["g=B"], 10) == pytest.approx(0.1 / 0.3)

    def test_absent_from_top_k(self):
        ds, part = population({"A": 50, "B": 50})
        lst = ranked(["A"] * 4 + ["B"])
        groups = by_label(part)
        assert skew_at_k(lst, part, groups["g=B"], 4) == 0.0

    def test_k_out_of_range(self):
        ds, part = population({"A": 1})
        lst = ranked(["A"])
        with pytest.raises(UsageError):
            skew_at_k(lst, part, part.subgroups[0], 2)

    def test_explicit_population_fractions(self):
        ds, part = population({"A": 50, "B": 50})
        lst = ranked(["A", "A", "B", "B"])
        sg = by_label(part)["g=A"]
        assert skew_at_k(lst, part, sg, 2, population={"g=A": 0.25, "g=B": 0.75}) == pytest.approx(4.0)

    def test_zero_population_fraction_undefined(self):
        ds, part = population({"A": 10, "B": 10})
        lst = ranked(["A", "B"])
        sg = by_label(part)["g=A"]
        assert skew_at_k(lst, part, sg, 2, population={"g=A": 0.0, "g=B": 1.0}) is None


class TestSkewRatio:
    def test_seventy_thirty_ratio(self):
        ds, part = population({"A": 70, "B": 30})
        lst = ranked(["A"] * 9 + ["B"])
        res = skew_ratio_at_k(lst, part, 10)
        assert res.value == pytest.approx((0.1 / 0.3) / (0.9 / 0.7))
        assert res.value == pytest.approx(0.2593, abs=2e-4)

    def test_proportional_top_k(self):
        ds, part = population({"A": 50, "B": 50})
        res = skew_ratio_at_k(ranked(["A", "B"] * 3), part, 6)
        assert res.value == 1.0

    def test_missing_subgroup_gives_zero(self):
        ds, part = population({"A": 50, "B": 50})
        res = skew_ratio_at_k(ranked(["A"] * 6), part, 6)
        assert res.value == 0.0


class TestMeanAttention:
    def test_alternating_list_geometric(self):
        ds, part = population({"A": 10, "B": 10})
        lst = ranked(["A", "B", "A", "B"])
        groups = by_label(part)
        assert mean_attention(lst, part, groups["g=A"], GEO) == pytest.approx(0.3125)
        assert mean_attention(lst, part, groups["g=B"], GEO) == pytest.approx(0.15625)

    def test_single_item_list(self):
        ds, part = population({"A": 5})
        lst = ranked(["A"])
        assert mean_attention(lst, part, part.subgroups[0], LOG) == attention_value(LOG, 1)

    def test_absent_subgroup_undefined(self):
        ds, part = population({"A": 5, "B": 5})
        lst = ranked(["A", "A"])
        assert mean_attention(lst, part, by_label(part)["g=B"], GEO) is None


class TestAttentionRatio:
    def test_alternating_fixture(self):
        ds, part = population({"A": 10, "B": 10})
        res = attention_ratio(ranked(["A", "B", "A", "B"]), part, GEO)
        assert res.value == pytest.approx(0.15625 / 0.3125)
        assert res.value == pytest.approx(0.5)

    def test_symmetric_positions_closed_form(self):
        ds, part = population({"A": 10, "B": 10})
        for model in (GEO, LOG):
            res = attention_ratio(ranked(["A", "B", "B", "A"]), part, model)
            ma_a = (attention_value(model, 1) + attention_value(model, 4)) / 2
            ma_b = (attention_value(model, 2) + attention_value(model, 3)) / 2
            assert res.value == pytest.approx(min(ma_a, ma_b) / max(ma_a, ma_b))

    def test_single_represented_subgroup(self):
        ds, part = population({"A": 10})
        res = attention_ratio(ranked(["A", "A"]), part, GEO)
        assert res.value == 1.0
        assert "single subgroup" in res.notes

    def test_swap_toward_minimum_does_not_decrease(self):
        ds, part = population({"A": 10, "B": 10})
        worse = attention_ratio(ranked(["A", "A", "B", "B"]), part, GEO)
        better = attention_ratio(ranked(["A", "B", "A", "B"]), part, GEO)
        assert better.value >= worse.value


class TestLoadRankedList:
    CSV = "rank,g,id\n2,B,x2\n1,A,x1\n3,A,x3\n"

    def test_rows_sorted_by_rank(self):
        lst = load_ranked_list(io.StringIO(self.CSV), ["g"], id_column="id")
        assert [item.item_id for item in lst.items] == ["x1", "x2", "x3"]
        assert lst.items[0].attributes == {"g": "A"}

    def test_duplicate_rank_rejected(self):
        with pytest.raises(SchemaError):
            load_ranked_list(io.StringIO("rank,g\n1,A\n1,B\n"), ["g"])

    def test_gap_in_ranks_rejected(self):
        with pytest.raises(SchemaError):
            load_ranked_list(io.StringIO("rank,g\n1,A\n3,B\n"), ["g"])

    def test_non_integer_rank_rejected(self):
        with pytest.raises(ParseError, match="row 2"):
            load_ranked_list(io.StringIO("rank,g\nfirst,A\n"), ["g"])

    def test_missing_column_rejected(self):
        with pytest.raises(ConfigError):
            load_ranked_list(io.StringIO("rank,h\n1,A\n"), ["g"])


def test_brute_force_oracle_equivalence():
    from . import oracle
    import random

    rng = random.Random(77)
    for _ in range(50):
        n_groups = rng.randrange(2, 4)
        names = [f"G{i}" for i in range(n_groups)]
        counts = {g: rng.randrange(1, 20) for g in names}
        ds, part = population(counts)
        length = rng.randrange(1, 13)
        sequence = [rng.choice(names) for _ in range(length)]
        lst = ranked(sequence)
        k = rng.randrange(1, length + 1)
        groups = by_label(part)
        for g in names:
            got = skew_at_k(lst, part, groups[f"g={g}"], k)
            want = oracle.skew(
                [f"g={x}" for x in sequence],
                {f"g={x}": c for x, c in counts.items()},
                f"g={g}",
                k,
            )
            assert got == pytest.approx(want) if want is not None else got is None
            att = lambda pos: 0.5 * 0.5 ** (pos - 1)
            got_ma = mean_attention(lst, part, groups[f"g={g}"], GEO)
            want_ma = oracle.mean_attention(
                [f"g={x}" for x in sequence], f"g={g}", att
            )
            if want_ma is None:
                assert got_ma is None
            else:
                assert got_ma == pytest.approx(want_ma)
