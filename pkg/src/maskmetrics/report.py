"""CSV serialization of metric records.

Schema: ``filename,label,<metrics in request order>[,tp,tn,fp,fn]``.
Reals carry up to 6 significant digits, NaN cells are the literal
"nan", lines end with "\\n" and the decimal separator is always "."
regardless of locale, so output is byte-identical across runs and
platforms.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .errors import SchemaMismatch
from .evaluator import MetricRecord

_COUNT_COLUMNS = ("tp", "tn", "fp", "fn")


def _format_value(value: float) -> str:
    if math.isnan(value):
        return "nan"
    return f"{value:.6g}"


def _render_row(cells) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerow(cells)
    return buffer.getvalue()


def _schema(records: list[MetricRecord], metrics) -> tuple[list[str], bool]:
    if not records:
        return list(metrics or []), False
    metric_names = list(records[0].values.keys())
    with_counts = records[0].counts is not None
    for record in records[1:]:
        if list(record.values.keys()) != metric_names or (record.counts is not None) != with_counts:
            raise SchemaMismatch("records do not share one metric-name set")
    return metric_names, with_counts


def write_csv(records: list[MetricRecord], path, append: bool = False, metrics=None) -> int:
    """Write records to ``path``; returns the number of data rows written.

    With ``append`` the header is written only when the file is new or
    empty; appending to a file whose header differs raises
    SchemaMismatch.  ``metrics`` fixes the header columns when
    ``records`` is empty.
    """
    path = Path(path)
    metric_names, with_counts = _schema(records, metrics)
    header = ["filename", "label", *metric_names]
    if with_counts:
        header.extend(_COUNT_COLUMNS)
    header_line = _render_row(header)

    write_header = True
    mode = "w"
    if append and path.exists() and path.stat().st_size > 0:
        with open(path, encoding="utf-8", newline="") as fh:
            existing = fh.readline()
        if existing.rstrip("\r\n") != header_line.rstrip("\n"):
            raise SchemaMismatch(
                f"{path.name}: existing header {existing.strip()!r} "
                f"does not match {header_line.strip()!r}"
            )
        write_header = False
        mode = "a"

    with open(path, mode, encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if write_header:
            writer.writerow(header)
        for record in records:
            row = [record.filename, record.label]
            row.extend(_format_value(record.values[name]) for name in metric_names)
            if with_counts:
                row.extend(getattr(record.counts, name) for name in _COUNT_COLUMNS)
            writer.writerow(row)
    return len(records)
