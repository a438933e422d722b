"""Bundled case-study fixtures.

The law-school case study ships as a frozen table of per-subgroup
(positives, false negatives) counts whose record-level expansion
reproduces the published false negative rates: per intersectional
subgroup to within 1.5e-5 and per marginal group (gender-only,
white/nonwhite) to within 1.5e-5. The counts were found by constrained
integer search; regenerate the record-level CSV with write_lsac_records.
"""

from __future__ import annotations

import csv
import io

# (gender, race) -> (bar-passers, false negatives among them)
LSAC_COUNTS: dict[tuple[str, str], tuple[int, int]] = {
    ("woman", "asian"): (415, 1),
    ("woman", "black"): (827, 32),
    ("woman", "hisp"): (414, 3),
    ("woman", "white"): (10283, 39),
    ("man", "asian"): (1639, 32),
    ("man", "black"): (398, 26),
    ("man", "hisp"): (1343, 36),
    ("man", "white"): (14217, 212),
}

#: Published per-subgroup false negative rates (gender, race).
LSAC_TABLE3_FNR: dict[tuple[str, str], float] = {
    ("woman", "asian"): 0.002398,
    ("woman", "black"): 0.038700,
    ("woman", "hisp"): 0.007246,
    ("woman", "white"): 0.003802,
    ("man", "asian"): 0.019512,
    ("man", "black"): 0.065327,
    ("man", "hisp"): 0.026804,
    ("man", "white"): 0.014920,
}

#: Published marginal false negative rates.
LSAC_RACE_FNR = {"nonwhite": 0.025829, "white": 0.010230}
LSAC_GENDER_FNR = {"woman": 0.006267, "man": 0.017384}

#: Non-passers added per subgroup (all correctly predicted) so pass-rate
#: style metrics stay non-degenerate; they do not affect any FNR.
LSAC_NEGATIVES_PER_SUBGROUP = 40


def lsac_records_csv() -> str:
    """Record-level expansion of the frozen counts as CSV text.

    Columns: gender, race, race_bin (white/nonwhite), label (ground
    truth), pred. False negatives come first within each subgroup; row
    order is deterministic.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["gender", "race", "race_bin", "label", "pred"])
    for (gender, race), (positives, fn) in sorted(LSAC_COUNTS.items()):
        race_bin = "white" if race == "white" else "nonwhite"
        for i in range(positives):
            pred = "fail" if i < fn else "pass"
            writer.writerow([gender, race, race_bin, "pass", pred])
        for _ in range(LSAC_NEGATIVES_PER_SUBGROUP):
            writer.writerow([gender, race, race_bin, "fail", "fail"])
    return out.getvalue()


def write_lsac_records(path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(lsac_records_csv())


def table3_rates_csv() -> str:
    """Per-subgroup FNR table in the precomputed-rates input format."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["subgroup", "rate"])
    for (gender, race), rate in sorted(LSAC_TABLE3_FNR.items()):
        writer.writerow([f"gender={gender}×race={race}", f"{rate:.6f}"])
    return out.getvalue()


def write_table3_rates(path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(table3_rates_csv())


def gerrymander_csv(per_cell: int = 2) -> str:
    """The race-by-gender fixture where every marginal looks fair.

    All black men and white women receive the positive prediction; no
    black women or white men do. Each marginal pass rate is 0.5, yet the
    intersectional demographic parity ratio is 0.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["race", "gender", "pred"])
    passes = {("black", "man"), ("white", "woman")}
    for race in ("black", "white"):
        for gender in ("man", "woman"):
            pred = "pass" if (race, gender) in passes else "fail"
            for _ in range(per_cell):
                writer.writerow([race, gender, pred])
    return out.getvalue()


def write_gerrymander(path, per_cell: int = 2) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(gerrymander_csv(per_cell))
