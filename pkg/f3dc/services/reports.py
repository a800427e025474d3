"""
Report rendering: aligned text tables for stdout and lossless CSV files
"""
import csv
import io
import typing
from fractions import Fraction
from pathlib import Path
from typing import Sequence, TypeVar

import structlog
from pydantic import BaseModel

from f3dc.errors import ConfigError

logger = structlog.get_logger()

RowT = TypeVar("RowT", bound=BaseModel)


def _csv_cell(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str, annotation: object, column: str) -> object:
    try:
        if annotation is bool:
            if text not in ("true", "false"):
                raise ValueError(text)
            return text == "true"
        if annotation is Fraction:
            return Fraction(text)
        if annotation is int:
            return int(text)
        if annotation is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"column {column}: cannot parse {text!r}")
    return text


def _table_cell(value: object) -> str:
    if isinstance(value, bool):
        return "PASS" if value else "FAIL"
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{float(value):.2f}"
    if isinstance(value, float):
        return f"{value:.4f}" if abs(value) < 1e6 else f"{value:.4e}"
    return str(value)


def render_csv(rows: Sequence[BaseModel]) -> str:
    if not rows:
        return ""
    columns = list(type(rows[0]).model_fields)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(getattr(row, column)) for column in columns])
    return buffer.getvalue()


def write_csv(rows: Sequence[BaseModel], path: str | Path) -> None:
    Path(path).write_text(render_csv(rows), encoding="utf-8")
    logger.info("csv_written", path=str(path), rows=len(rows))


def parse_csv(text: str, model: type[RowT]) -> list[RowT]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    hints = typing.get_type_hints(model)
    unknown = set(header) - set(model.model_fields)
    if unknown:
        raise ConfigError(f"unexpected columns for {model.__name__}: {sorted(unknown)}")
    return [
        model(**{column: _parse_cell(cell, hints[column], column) for column, cell in zip(header, line)})
        for line in reader
        if line
    ]


def read_csv(path: str | Path, model: type[RowT]) -> list[RowT]:
    return parse_csv(Path(path).read_text(encoding="utf-8"), model)


def render_table(rows: Sequence[BaseModel], title: str | None = None) -> str:
    """Fixed-width text table of `rows`, one column per model field."""
    if not rows:
        return f"{title}\n(no rows)\n" if title else "(no rows)\n"
    columns = list(type(rows[0]).model_fields)
    cells = [[_table_cell(getattr(row, column)) for column in columns] for row in rows]
    widths = [max(len(column), *(len(line[n]) for line in cells)) for n, column in enumerate(columns)]
    lines = [title] if title else []
    lines.append("  ".join(column.ljust(width) for column, width in zip(columns, widths)))
    lines.append("  ".join("-" * width for width in widths))
    lines.extend("  ".join(cell.rjust(width) for cell, width in zip(line, widths)) for line in cells)
    return "\n".join(lines) + "\n"
