"""Measurement data: records of (project, method, rater, value).

The on-disk format is a UTF-8 CSV with the exact header
``project,method,rater,value``.  Rater order inside a method is the order
of first appearance in the file and defines the "first" and "second"
measurement of every project.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import (
    DuplicateCell,
    IncompleteDesign,
    MalformedLine,
    NonPositiveValue,
    TooManyRaters,
    UnknownMethod,
)

HEADER = ("project", "method", "rater", "value")


@dataclass(frozen=True)
class MeasurementRecord:
    project_id: str
    method_id: str
    rater_id: str
    value: float
    line: int | None = field(default=None, compare=False)

    def to_dict(self):
        return {
            "project": self.project_id,
            "method": self.method_id,
            "rater": self.rater_id,
            "value": self.value,
        }


@dataclass(frozen=True)
class MeasurementDataset:
    """Immutable, indexed collection of measurement records."""

    records: tuple
    projects: tuple
    methods: tuple
    raters_per_method: dict
    _cells: dict = field(repr=False, compare=False)

    @classmethod
    def from_records(cls, records: Iterable[MeasurementRecord]) -> "MeasurementDataset":
        records = tuple(records)
        projects: dict = {}
        methods: dict = {}
        raters: dict = {}
        cells: dict = {}
        for rec in records:
            if not (rec.value > 0) or math.isinf(rec.value):
                raise NonPositiveValue(rec.line, rec.value)
            key = (rec.project_id, rec.method_id, rec.rater_id)
            if key in cells:
                raise DuplicateCell(*key, line=rec.line)
            cells[key] = rec.value
            projects.setdefault(rec.project_id, None)
            methods.setdefault(rec.method_id, None)
            raters.setdefault(rec.method_id, {}).setdefault(rec.rater_id, None)
        return cls(
            records=records,
            projects=tuple(projects),
            methods=tuple(methods),
            raters_per_method={m: tuple(r) for m, r in raters.items()},
            _cells=cells,
        )

    def value(self, project, method, rater):
        return self._cells.get((project, method, rater))

    def raters(self, method) -> tuple:
        if method not in self.raters_per_method:
            raise UnknownMethod(method)
        return self.raters_per_method[method]

    def projects_for(self, method) -> tuple:
        """Projects with at least one measurement by ``method``, in dataset order."""
        self.raters(method)
        seen = {p for (p, m, _r) in self._cells if m == method}
        return tuple(p for p in self.projects if p in seen)

    def scaled(self, method, factor: float) -> "MeasurementDataset":
        """Copy with every value of ``method`` multiplied by ``factor``."""
        return MeasurementDataset.from_records(
            MeasurementRecord(r.project_id, r.method_id, r.rater_id,
                              r.value * factor if r.method_id == method else r.value, r.line)
            for r in self.records
        )

    def record_multiset(self):
        from collections import Counter

        return Counter((r.project_id, r.method_id, r.rater_id, r.value) for r in self.records)

    def digest(self):
        return {
            "records": len(self.records),
            "projects": len(self.projects),
            "methods": list(self.methods),
            "raters_per_method": {m: list(r) for m, r in self.raters_per_method.items()},
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HEADER)
        for r in self.records:
            writer.writerow((r.project_id, r.method_id, r.rater_id, repr(r.value)))
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.records], indent=2)


def parse_csv(source: Union[bytes, str, io.IOBase]) -> MeasurementDataset:
    """Parse measurement CSV into a dataset.

    ``source`` may be bytes, text or a binary/text stream.  The header
    line is optional only in the sense that a first line which is not the
    header is treated as data; when present it must match exactly.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedLine(1, f"not UTF-8: {exc}") from None
    if source.startswith("\ufeff"):
        source = source[1:]

    records = []
    for lineno, row in enumerate(csv.reader(io.StringIO(source)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if lineno == 1 and tuple(c.lower() for c in cells) == HEADER:
            if tuple(cells) != HEADER:
                raise MalformedLine(1, "header must be exactly 'project,method,rater,value'")
            continue
        if len(cells) != 4:
            raise MalformedLine(lineno, f"expected 4 fields, got {len(cells)}")
        project, method, rater, raw = cells
        if not project or not method or not rater:
            raise MalformedLine(lineno, "empty identifier")
        try:
            value = float(raw)
        except ValueError:
            raise MalformedLine(lineno, f"value {raw!r} is not a number") from None
        if math.isnan(value) or math.isinf(value):
            raise MalformedLine(lineno, f"value {raw!r} is not finite")
        if value <= 0:
            raise NonPositiveValue(lineno, value)
        records.append(MeasurementRecord(project, method, rater, value, lineno))
    return MeasurementDataset.from_records(records)


def read_csv(path) -> MeasurementDataset:
    with open(path, "rb") as fh:
        return parse_csv(fh.read())


def extract_pair(ds: MeasurementDataset, method, projects=None):
    """First and second measurements of ``method``, aligned by project.

    Returns ``(project_ids, first, second)``.  Every project the method
    measured (or every project in ``projects`` when given) must have both
    raters.
    """
    raters = ds.raters(method)
    if len(raters) > 2:
        raise TooManyRaters(len(raters), method)
    projects = ds.projects_for(method) if projects is None else tuple(projects)
    if len(raters) < 2:
        raise IncompleteDesign(list(projects), method)
    r1, r2 = raters
    first, second, missing = [], [], []
    for p in projects:
        a = ds.value(p, method, r1)
        b = ds.value(p, method, r2)
        if a is None or b is None:
            missing.append(p)
            continue
        first.append(a)
        second.append(b)
    if missing:
        raise IncompleteDesign(missing, method)
    return tuple(projects), first, second
