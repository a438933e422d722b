"""Shared test helpers: build datasets directly from plain row dicts."""

from __future__ import annotations

from fairaudit.data_model import AttributeSchema, Dataset, Record


def make_dataset(rows, protected, legitimate=()):
    """rows: dicts with attribute values plus optional pred/true/score/flags."""
    records = []
    observed = {name: set() for name in protected}
    labels = set()
    for row in rows:
        attrs = {}
        for name in protected:
            v = row.get(name)
            if v:
                attrs[name] = v
                observed[name].add(v)
        pred = row.get("pred")
        true = row.get("true")
        for lab in (pred, true):
            if lab is not None:
                labels.add(lab)
        records.append(
            Record(
                attributes=attrs,
                predicted_label=pred,
                true_label=true,
                score=row.get("score"),
                legitimate_flags=row.get("flags", {}),
            )
        )
    schema = tuple(
        AttributeSchema(name=name, domain=tuple(sorted(observed[name])))
        for name in protected
    )
    return Dataset(
        schema=schema,
        records=tuple(records),
        class_set=tuple(sorted(labels)),
        legitimate_names=tuple(legitimate),
    )
