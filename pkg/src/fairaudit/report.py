"""Audit orchestration and deterministic report emission.

run_audit wires the modules together for one batch run; emit_report
renders the result as canonical JSON (fixed key order, 6 significant
digits) or markdown. Identical inputs and config produce byte-identical
output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import __version__
from .classification import (
    MetricResult,
    RateKind,
    UNDEFINED,
    conditional_statistical_parity_ratio,
    demographic_parity_ratio,
    disparate_impact,
    equal_opportunity_ratio,
    equalized_odds_ratio,
    group_benefit_ratio_intersectional,
    min_max_ratio,
    multiclass_equalized_odds_ratio,
    rate_parity_ratio,
)
from .data_model import ColumnRoles, Dataset, load_dataset
from .distribution import DEFAULT_BINS, DEFAULT_SMOOTHING, worst_case_kl
from .errors import ConfigError, ParseError
from .ranking import (
    AttentionModel,
    attention_ratio,
    load_ranked_list,
    skew_ratio_at_k,
)
from .subgroups import SubgroupPartition, build_partition, key_label

CLASSIFICATION_METRICS = (
    "dpr",
    "di",
    "cspr",
    "eoppr",
    "tpr-parity",
    "tnr-parity",
    "fpr-parity",
    "fnr-parity",
    "eodds",
    "gbr",
    "meoddr",
)
DISTRIBUTION_METRICS = ("wkl", "wtv")
RANKING_METRICS = ("skew-ratio", "attention-ratio")
ALL_METRICS = CLASSIFICATION_METRICS + DISTRIBUTION_METRICS + RANKING_METRICS

#: metrics whose value is a min-max ratio and gets a threshold verdict
RATIO_METRICS = set(CLASSIFICATION_METRICS) | set(RANKING_METRICS) | {"rate-ratio"}

_PARITY_KINDS = {
    "tpr-parity": RateKind.TPR,
    "tnr-parity": RateKind.TNR,
    "fpr-parity": RateKind.FPR,
    "fnr-parity": RateKind.FNR,
}


@dataclass
class AuditConfig:
    """Everything one audit run needs; mirrors the CLI flags."""

    data: str | None = None
    rank_data: str | None = None
    rates_file: str | None = None
    protected: tuple[str, ...] = ()
    pred_col: str | None = None
    label_col: str | None = None
    score_col: str | None = None
    legitimate_cols: tuple[str, ...] = ()
    positive: str | None = None
    metrics: tuple[str, ...] = ()
    min_support: int = 1
    legit_filter: tuple[tuple[str, bool], ...] | None = None
    attention: str = "log"
    attention_p: float = 0.5
    bins: int = DEFAULT_BINS
    divergence: str = "kl"
    threshold: float = 0.8
    top_k: int | None = None
    output_format: str = "json"
    strict: bool = False
    delimiter: str = ","
    domains: Mapping[str, Sequence[str]] | None = None
    rank_column: str = "rank"
    id_column: str | None = None


@dataclass
class AuditReport:
    config: AuditConfig
    partition: SubgroupPartition | None
    metrics: list[MetricResult]
    verdicts: dict[str, str | None]
    input_digests: dict[str, str]
    unassigned: int = 0

    @property
    def any_fail(self) -> bool:
        return any(v == "fail" for v in self.verdicts.values())


def _validate_config(config: AuditConfig) -> None:
    if not config.metrics:
        raise ConfigError("metric selection is empty")
    if not 0.0 < config.threshold <= 1.0:
        raise ConfigError("threshold must be in (0, 1]")
    if len(set(config.metrics)) != len(config.metrics):
        raise ConfigError("duplicate metric in selection")
    for m in config.metrics:
        if m not in ALL_METRICS and m != "rate-ratio":
            raise ConfigError(f"unknown metric {m!r}")
    needs_records = [m for m in config.metrics if m != "rate-ratio"]
    if needs_records and config.data is None:
        raise ConfigError("record-level metrics require --data")
    if needs_records and not config.protected:
        raise ConfigError("record-level metrics require --protected")
    if any(m in RANKING_METRICS for m in config.metrics) and config.rank_data is None:
        raise ConfigError("ranking metrics require --rank-data")
    if "rate-ratio" in config.metrics and config.rates_file is None:
        raise ConfigError("rate-ratio requires --rates-file")
    needs_positive = set(CLASSIFICATION_METRICS) - {"meoddr"}
    if any(m in needs_positive for m in config.metrics) and config.positive is None:
        raise ConfigError("classification metrics require --positive")
    if "cspr" in config.metrics and config.legit_filter is None:
        raise ConfigError("cspr requires --legit-filter")


def load_rates_file(path, delimiter: str = ",") -> dict[str, float]:
    """Two-column (subgroup label, rate) file; header row optional."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rates: dict[str, float] = {}
    for row_no, row in enumerate(rows, start=1):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"row {row_no}: expected 2 fields, got {len(row)}")
        label, token = row[0].strip(), row[1].strip()
        try:
            value = float(token)
        except ValueError:
            if row_no == 1:
                continue  # header row
            raise ParseError(f"row {row_no}: not a number: {token!r}") from None
        if value < 0:
            raise ParseError(f"row {row_no}: negative rate {value}")
        if label in rates:
            raise ParseError(f"row {row_no}: duplicate subgroup label {label!r}")
        rates[label] = value
    if not rates:
        raise ParseError("rates file holds no rates")
    return rates


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _compute_metric(
    name: str,
    dataset: Dataset,
    partition: SubgroupPartition,
    config: AuditConfig,
    ranked,
) -> MetricResult:
    if name == "dpr":
        return demographic_parity_ratio(dataset, partition, config.positive, config.strict)
    if name == "di":
        return disparate_impact(dataset, partition, config.positive, config.strict)
    if name == "cspr":
        return conditional_statistical_parity_ratio(
            dataset, partition, config.positive, config.legit_filter, config.strict
        )
    if name == "eoppr":
        return equal_opportunity_ratio(dataset, partition, config.positive, config.strict)
    if name in _PARITY_KINDS:
        return rate_parity_ratio(
            dataset, partition, config.positive, _PARITY_KINDS[name], config.strict
        )
    if name == "eodds":
        return equalized_odds_ratio(dataset, partition, config.positive, config.strict)
    if name == "gbr":
        return group_benefit_ratio_intersectional(
            dataset, partition, config.positive, config.strict
        )
    if name == "meoddr":
        return multiclass_equalized_odds_ratio(dataset, partition, config.strict)
    if name in ("wkl", "wtv"):
        # "wkl" honors the --divergence selector; "wtv" forces total variation
        divergence = "tv" if name == "wtv" else config.divergence
        return worst_case_kl(dataset, partition, config.bins, divergence)
    if name == "skew-ratio":
        k = config.top_k if config.top_k is not None else len(ranked)
        return skew_ratio_at_k(ranked, partition, k, strict=config.strict)
    if name == "attention-ratio":
        model = AttentionModel(kind=config.attention, parameter=config.attention_p)
        return attention_ratio(ranked, partition, model, config.strict)
    raise ConfigError(f"unknown metric {name!r}")


def run_audit(config: AuditConfig) -> AuditReport:
    """Run every selected metric and assemble the report."""
    _validate_config(config)

    digests: dict[str, str] = {}
    dataset = partition = ranked = None
    if config.data is not None:
        roles = ColumnRoles(
            protected=tuple(config.protected),
            predicted=config.pred_col,
            true=config.label_col,
            score=config.score_col,
            legitimate=tuple(config.legitimate_cols),
            delimiter=config.delimiter,
            domains=config.domains,
        )
        dataset = load_dataset(config.data, roles)
        digests["data"] = _digest(config.data)
        if config.protected:
            partition = build_partition(dataset, config.protected, config.min_support)
    if config.rank_data is not None:
        ranked = load_ranked_list(
            config.rank_data,
            config.protected,
            rank_column=config.rank_column,
            id_column=config.id_column,
            delimiter=config.delimiter,
        )
        digests["rank_data"] = _digest(config.rank_data)

    results: list[MetricResult] = []
    for name in config.metrics:
        if name == "rate-ratio":
            rates = load_rates_file(config.rates_file, config.delimiter)
            digests["rates_file"] = _digest(config.rates_file)
            results.append(min_max_ratio(rates, metric_id="rate-ratio"))
        else:
            results.append(_compute_metric(name, dataset, partition, config, ranked))

    verdicts: dict[str, str | None] = {}
    for res in results:
        if res.metric_id in RATIO_METRICS:
            if res.value is UNDEFINED:
                verdicts[res.metric_id] = None
            else:
                verdicts[res.metric_id] = (
                    "fail" if res.value < config.threshold else "pass"
                )

    return AuditReport(
        config=config,
        partition=partition,
        metrics=results,
        verdicts=verdicts,
        input_digests=digests,
        unassigned=len(partition.unassigned) if partition is not None else 0,
    )


def _fmt(value):
    """6 significant digits for report floats, full precision internally."""
    if isinstance(value, float):
        return float(f"{value:.6g}")
    return value


def _verdict_rule(metric_id: str) -> str:
    return "four-fifths" if metric_id == "di" else "four-fifths (extended)"


def _config_dict(config: AuditConfig) -> dict:
    return {
        "data": config.data,
        "rank_data": config.rank_data,
        "rates_file": config.rates_file,
        "protected": list(config.protected),
        "pred_col": config.pred_col,
        "label_col": config.label_col,
        "score_col": config.score_col,
        "legitimate_cols": list(config.legitimate_cols),
        "positive": config.positive,
        "metrics": list(config.metrics),
        "min_support": config.min_support,
        "legit_filter": (
            None
            if config.legit_filter is None
            else [[flag, wanted] for flag, wanted in config.legit_filter]
        ),
        "attention": config.attention,
        "attention_p": _fmt(config.attention_p),
        "bins": config.bins,
        "divergence": config.divergence,
        "threshold": _fmt(config.threshold),
        "top_k": config.top_k,
        "output_format": config.output_format,
        "strict": config.strict,
        "delimiter": config.delimiter,
        "min_support_effective": max(config.min_support, 1),
    }


def report_dict(report: AuditReport) -> dict:
    """The canonical JSON-ready structure, keys in fixed order."""
    partition = None
    if report.partition is not None:
        p = report.partition
        partition = {
            "attributes": list(p.attribute_names),
            "total_candidates": p.total_candidates,
            "included": [
                {
                    "subgroup": key_label(sg.key),
                    "members": len(sg.member_indices),
                }
                for sg in p.subgroups
            ],
            "excluded": [
                {
                    "subgroup": key_label(ex.key),
                    "reason": ex.reason,
                    "members": len(ex.member_indices),
                }
                for ex in p.excluded
            ],
            "unassigned": report.unassigned,
        }
    metrics = []
    for res in report.metrics:
        entry = {
            "id": res.metric_id,
            "value": _fmt(res.value) if res.value is not UNDEFINED else None,
            "per_subgroup": {
                label: _fmt(v) for label, v in sorted(res.per_subgroup.items())
            },
            "min_subgroup": res.min_subgroup,
            "max_subgroup": res.max_subgroup,
            "notes": list(res.notes),
        }
        if res.metric_id in RATIO_METRICS:
            entry["verdict"] = report.verdicts.get(res.metric_id)
            entry["verdict_rule"] = _verdict_rule(res.metric_id)
        else:
            entry["verdict"] = None
            entry["verdict_rule"] = None
        metrics.append(entry)
    return {
        "schema_version": "1",
        "tool_version": __version__,
        "inputs": {
            name: f"sha256:{digest}"
            for name, digest in sorted(report.input_digests.items())
        },
        "config": _config_dict(report.config),
        "partition": partition,
        "metrics": metrics,
    }


def emit_report(report: AuditReport, output_format: str | None = None) -> bytes:
    """Render the report as UTF-8 bytes in the requested format."""
    fmt = output_format or report.config.output_format
    if fmt == "json":
        text = json.dumps(report_dict(report), indent=2, ensure_ascii=False) + "\n"
        return text.encode("utf-8")
    if fmt == "markdown":
        return _emit_markdown(report).encode("utf-8")
    raise ConfigError(f"unknown output format {fmt!r}")


def _emit_markdown(report: AuditReport) -> str:
    d = report_dict(report)
    out = io.StringIO()
    out.write("# Fairness audit report\n\n")
    out.write(f"tool version: {d['tool_version']}\n\n")
    for name, digest in d["inputs"].items():
        out.write(f"- {name}: `{digest}`\n")
    if d["partition"] is not None:
        p = d["partition"]
        out.write(
            f"\n## Partition\n\nattributes: {', '.join(p['attributes'])} — "
            f"{len(p['included'])} of {p['total_candidates']} candidate subgroups "
            f"included, {len(p['excluded'])} excluded, "
            f"{p['unassigned']} records unassigned\n"
        )
        if p["excluded"]:
            out.write("\n| excluded subgroup | reason | members |\n|---|---|---|\n")
            for ex in p["excluded"]:
                out.write(f"| {ex['subgroup']} | {ex['reason']} | {ex['members']} |\n")
    for m in d["metrics"]:
        out.write(f"\n## {m['id']}\n\n")
        value = "undefined" if m["value"] is None else f"{m['value']:.6g}"
        out.write(f"value: {value}")
        if m["verdict"] is not None:
            out.write(f" — verdict: {m['verdict']} ({m['verdict_rule']}, "
                      f"threshold {_fmt(report.config.threshold):g})")
        out.write("\n")
        if m["per_subgroup"]:
            out.write("\n| subgroup | value |\n|---|---|\n")
            for label, v in m["per_subgroup"].items():
                out.write(f"| {label} | {v:.6g} |\n")
        for note in m["notes"]:
            out.write(f"- note: {note}\n")
    return out.getvalue()
