"""Command-line front end.

Subcommands: classify (classification ratios, or precomputed rates via
--rates-file), dist (score-distribution divergence), rank (ranked-list
metrics) and audit (any mix). Exit codes: 0 all verdicts pass, 2 at
least one verdict fails, 1 operational error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, FairauditError
from .report import (
    ALL_METRICS,
    AuditConfig,
    emit_report,
    run_audit,
)

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

_DEFAULT_METRICS = {
    "classify": "dpr,di,eoppr,eodds,gbr",
    "dist": "wkl",
    "rank": "skew-ratio,attention-ratio",
}


def _parse_legit_filter(expr: str) -> tuple[tuple[str, bool], ...]:
    clauses = []
    for part in expr.split(","):
        part = part.strip()
        if "=" not in part:
            raise ConfigError(
                f"bad legitimate-filter clause {part!r}; expected flag=true|false"
            )
        flag, value = part.split("=", 1)
        value = value.strip().lower()
        if value not in ("true", "false"):
            raise ConfigError(f"bad legitimate-filter value {value!r}")
        clauses.append((flag.strip(), value == "true"))
    return tuple(clauses)


def _parse_domains(entries) -> dict[str, list[str]] | None:
    if not entries:
        return None
    out = {}
    for entry in entries:
        if "=" not in entry:
            raise ConfigError(f"bad domain declaration {entry!r}; expected name=a,b,c")
        name, values = entry.split("=", 1)
        out[name.strip()] = [v.strip() for v in values.split(",") if v.strip()]
    return out


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="record-level input CSV")
    p.add_argument("--rank-data", help="ranked-list input CSV")
    p.add_argument("--rates-file", help="precomputed (subgroup,rate) CSV")
    p.add_argument("--protected", default="", help="comma-separated protected columns")
    p.add_argument("--pred-col", help="predicted-label column")
    p.add_argument("--label-col", help="true-label column")
    p.add_argument("--score-col", help="continuous score column")
    p.add_argument("--legit-cols", default="", help="comma-separated legitimate flag columns")
    p.add_argument("--positive", help="positive output label")
    p.add_argument("--metrics", help="comma-separated metric selection")
    p.add_argument("--min-support", type=int, default=1,
                   help="exclude subgroups with fewer members (default 1)")
    p.add_argument("--legit-filter",
                   help="conjunction of flag=true/false tests for cspr")
    p.add_argument("--attention", choices=["log", "geometric"], default="log")
    p.add_argument("--attention-p", type=float, default=0.5,
                   help="geometric attention success probability")
    p.add_argument("--bins", type=int, default=64,
                   help="histogram bins for distribution metrics")
    p.add_argument("--divergence", choices=["kl", "tv"], default="kl")
    p.add_argument("--threshold", type=float, default=0.8,
                   help="four-fifths style verdict threshold")
    p.add_argument("--top-k", type=int, help="k for skew (default: list length)")
    p.add_argument("--format", choices=["json", "markdown"], default="json")
    p.add_argument("--rank-col", default="rank", help="rank column name")
    p.add_argument("--id-col", help="item id column name")
    p.add_argument("--delimiter", default=",",
                   help="field delimiter (use '\\t' for tabs)")
    p.add_argument("--domain", action="append", default=[], metavar="NAME=a,b,c",
                   help="declare a protected attribute's domain explicitly")
    p.add_argument("--strict", action="store_true",
                   help="treat undefined subgroup statistics as errors")
    p.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairaudit",
        description="Audit recorded model outputs for intersectional fairness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("classify", "classification fairness ratios"),
        ("dist", "worst-case divergence of score distributions"),
        ("rank", "ranked-list representation and exposure ratios"),
        ("audit", "any combination of metrics"),
    ]:
        sp = sub.add_parser(name, help=doc)
        _add_common_flags(sp)
    return parser


def _config_from_args(args: argparse.Namespace) -> AuditConfig:
    metrics = args.metrics
    if metrics is None:
        if args.command == "classify" and args.rates_file:
            metrics = "rate-ratio"
        else:
            metrics = _DEFAULT_METRICS.get(args.command)
    if metrics is None:
        raise ConfigError(
            f"audit requires --metrics (choose from {', '.join(ALL_METRICS)})"
        )
    delimiter = "\t" if args.delimiter == "\\t" else args.delimiter
    return AuditConfig(
        data=args.data,
        rank_data=args.rank_data,
        rates_file=args.rates_file,
        protected=_csv_list(args.protected),
        pred_col=args.pred_col,
        label_col=args.label_col,
        score_col=args.score_col,
        legitimate_cols=_csv_list(args.legit_cols),
        positive=args.positive,
        metrics=_csv_list(metrics),
        min_support=args.min_support,
        legit_filter=(
            _parse_legit_filter(args.legit_filter) if args.legit_filter else None
        ),
        attention=args.attention,
        attention_p=args.attention_p,
        bins=args.bins,
        divergence=args.divergence,
        threshold=args.threshold,
        top_k=args.top_k,
        output_format=args.format,
        strict=args.strict,
        delimiter=delimiter,
        domains=_parse_domains(args.domain),
        rank_column=args.rank_col,
        id_column=args.id_col,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        report = run_audit(config)
        payload = emit_report(report)
    except FairauditError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return EXIT_FAIL if report.any_fail else EXIT_PASS


if __name__ == "__main__":
    raise SystemExit(main())
