"""Tabular record schema and CSV ingestion.

A Dataset is an immutable table of records carrying categorical protected
attributes, optional predicted/true labels, an optional continuous score
and optional boolean "legitimate" flags. Category comparison is exact
byte equality on trimmed text; no case folding, so distinct spellings
stay distinct categories.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, FieldRequirementError, ParseError, SchemaError

_TRUE_TOKENS = {"true", "1"}
_FALSE_TOKENS = {"false", "0"}


@dataclass(frozen=True)
class AttributeSchema:
    """A protected attribute: its name and finite ordered category domain."""

    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        # empty domains are only legal for datasets with zero records
        if len(set(self.domain)) != len(self.domain):
            raise SchemaError(f"attribute {self.name!r}: duplicate domain labels")


@dataclass(frozen=True)
class Record:
    """One observation: protected attributes plus recorded model outputs.

    Missing values are absent keys (attributes, legitimate_flags) or None
    (predicted_label, true_label, score).
    """

    attributes: Mapping[str, str]
    predicted_label: str | None = None
    true_label: str | None = None
    score: float | None = None
    legitimate_flags: Mapping[str, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Dataset:
    """Immutable table of records with the protected-attribute schema."""

    schema: tuple[AttributeSchema, ...]
    records: tuple[Record, ...]
    class_set: tuple[str, ...]
    legitimate_names: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def attribute(self, name: str) -> AttributeSchema:
        for a in self.schema:
            if a.name == name:
                return a
        raise ConfigError(f"unknown protected attribute {name!r}")


@dataclass(frozen=True)
class ColumnRoles:
    """Maps input columns to their roles during ingestion.

    domains, when given for an attribute, declares its categories explicitly
    (in the declared order) so structurally absent categories still show up
    as empty subgroups; inferred domains are sorted lexicographically.
    """

    protected: tuple[str, ...]
    predicted: str | None = None
    true: str | None = None
    score: str | None = None
    legitimate: tuple[str, ...] = ()
    delimiter: str = ","
    domains: Mapping[str, Sequence[str]] | None = None


def _parse_flag(token: str, column: str, row: int) -> bool | None:
    if token == "":
        return None
    low = token.lower()
    if low in _TRUE_TOKENS:
        return True
    if low in _FALSE_TOKENS:
        return False
    raise ParseError(f"row {row}: column {column!r}: not a boolean: {token!r}")


def load_dataset(source, config: ColumnRoles) -> Dataset:
    """Parse delimiter-separated text into a Dataset.

    source may be a path, a text stream or a byte stream (decoded as UTF-8).
    The first row is the header. Row numbers in errors are 1-based counting
    the header as row 1.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_dataset(fh, config)
    if isinstance(source.read(0), bytes):
        source = io.TextIOWrapper(source, encoding="utf-8", newline="")

    reader = csv.reader(source, delimiter=config.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("row 1: empty input, no header") from None
    header = [h.strip() for h in header]
    col_index = {name: i for i, name in enumerate(header)}

    needed = list(config.protected) + list(config.legitimate)
    for c in (config.predicted, config.true, config.score):
        if c is not None:
            needed.append(c)
    for c in needed:
        if c not in col_index:
            raise ConfigError(f"column {c!r} not found in header {header}")
    if not config.protected:
        raise ConfigError("no protected columns configured")

    explicit = dict(config.domains or {})
    for name in explicit:
        if name not in config.protected:
            raise ConfigError(f"explicit domain for non-protected column {name!r}")

    records: list[Record] = []
    observed: dict[str, set[str]] = {name: set() for name in config.protected}
    labels: set[str] = set()
    for row_no, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ParseError(
                f"row {row_no}: expected {len(header)} fields, got {len(row)}"
            )
        cells = [c.strip() for c in row]
        attrs: dict[str, str] = {}
        for name in config.protected:
            value = cells[col_index[name]]
            if value == "":
                continue
            if name in explicit and value not in explicit[name]:
                raise SchemaError(
                    f"row {row_no}: value {value!r} outside declared domain of {name!r}"
                )
            attrs[name] = value
            observed[name].add(value)

        predicted = true = None
        if config.predicted is not None:
            predicted = cells[col_index[config.predicted]] or None
            if predicted is not None:
                labels.add(predicted)
        if config.true is not None:
            true = cells[col_index[config.true]] or None
            if true is not None:
                labels.add(true)

        score = None
        if config.score is not None:
            token = cells[col_index[config.score]]
            if token != "":
                try:
                    score = float(token)
                except ValueError:
                    raise ParseError(
                        f"row {row_no}: column {config.score!r}: not a number: {token!r}"
                    ) from None

        flags: dict[str, bool] = {}
        for name in config.legitimate:
            parsed = _parse_flag(cells[col_index[name]], name, row_no)
            if parsed is not None:
                flags[name] = parsed

        records.append(
            Record(
                attributes=attrs,
                predicted_label=predicted,
                true_label=true,
                score=score,
                legitimate_flags=flags,
            )
        )

    schema = []
    for name in config.protected:
        if name in explicit:
            domain = tuple(explicit[name])
        else:
            domain = tuple(sorted(observed[name]))
        schema.append(AttributeSchema(name=name, domain=domain))

    return Dataset(
        schema=tuple(schema),
        records=tuple(records),
        class_set=tuple(sorted(labels)),
        legitimate_names=tuple(config.legitimate),
    )


def serialize_dataset(dataset: Dataset, config: ColumnRoles) -> str:
    """Write the dataset back out in the canonical column layout.

    Columns: protected (config order), predicted, true, score, legitimate.
    load_dataset(serialize_dataset(d, c), c) round-trips record for record.
    """
    out = io.StringIO()
    writer = csv.writer(out, delimiter=config.delimiter, lineterminator="\n")
    header = list(config.protected)
    if config.predicted is not None:
        header.append(config.predicted)
    if config.true is not None:
        header.append(config.true)
    if config.score is not None:
        header.append(config.score)
    header += list(config.legitimate)
    writer.writerow(header)
    for rec in dataset.records:
        row = [rec.attributes.get(name, "") for name in config.protected]
        if config.predicted is not None:
            row.append(rec.predicted_label or "")
        if config.true is not None:
            row.append(rec.true_label or "")
        if config.score is not None:
            row.append("" if rec.score is None else repr(rec.score))
        for name in config.legitimate:
            flag = rec.legitimate_flags.get(name)
            row.append("" if flag is None else ("true" if flag else "false"))
        writer.writerow(row)
    return out.getvalue()


@dataclass(frozen=True)
class Violation:
    """A record that lacks a field a metric requires."""

    record_index: int
    missing_field: str


def validate_for_metric(dataset: Dataset, requirement: Iterable[str]) -> list[Violation]:
    """Check every record carries the named fields.

    Field names: "predicted", "true", "score", or "legitimate:<flag>".
    Returns one Violation per (record, missing field); empty when satisfied.
    """
    wanted = list(requirement)
    violations: list[Violation] = []
    for i, rec in enumerate(dataset.records):
        for f in wanted:
            if f == "predicted" and rec.predicted_label is None:
                violations.append(Violation(i, f))
            elif f == "true" and rec.true_label is None:
                violations.append(Violation(i, f))
            elif f == "score" and rec.score is None:
                violations.append(Violation(i, f))
            elif f.startswith("legitimate:"):
                if f.split(":", 1)[1] not in rec.legitimate_flags:
                    violations.append(Violation(i, f))
    return violations


def require_fields(dataset: Dataset, indices: Sequence[int], fields: Iterable[str]) -> None:
    """Raise FieldRequirementError naming the first record missing a field."""
    for f in fields:
        for i in indices:
            rec = dataset.records[i]
            missing = (
                (f == "predicted" and rec.predicted_label is None)
                or (f == "true" and rec.true_label is None)
                or (f == "score" and rec.score is None)
                or (
                    f.startswith("legitimate:")
                    and f.split(":", 1)[1] not in rec.legitimate_flags
                )
            )
            if missing:
                raise FieldRequirementError(
                    f"record {i} lacks required field {f!r}"
                )
