"""Rendering of result rows as CSV, JSON or Markdown"""
import csv
import io
import json
import sys
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel

from app.config import settings

FORMAT_CSV = "csv"
FORMAT_JSON = "json"
FORMAT_MARKDOWN = "markdown"
FORMATS = (FORMAT_CSV, FORMAT_JSON, FORMAT_MARKDOWN)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"

_env = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    autoescape=False,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def to_records(rows: Iterable[BaseModel | Mapping[str, Any]]) -> list[dict[str, Any]]:
    """Plain dicts from pydantic rows or mappings."""
    return [row.model_dump(mode="json") if isinstance(row, BaseModel) else dict(row) for row in rows]


def format_cell(value: Any, decimals: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:+.{decimals}f}"
    return str(value)


def _columns(records: list[dict[str, Any]]) -> list[str]:
    columns: list[str] = []
    for record in records:
        for key in record:
            if key not in columns:
                columns.append(key)
    return columns


def render(
    rows: Iterable[BaseModel | Mapping[str, Any]],
    fmt: str,
    metadata: Mapping[str, Any] | None = None,
    title: str = "",
    decimals: int | None = None,
) -> str:
    """
    Render rows with a metadata header.

    CSV and Markdown cells are fixed-point strings; JSON keeps raw numbers.

    Raises:
        ValueError: for an unknown format
    """
    decimals = settings.TABLE_DECIMALS if decimals is None else decimals
    records = to_records(rows)
    metadata = dict(metadata or {})
    columns = _columns(records)

    if fmt == FORMAT_JSON:
        return json.dumps({"title": title, "metadata": metadata, "rows": records}, indent=2) + "\n"

    cells = [{column: format_cell(record.get(column), decimals) for column in columns} for record in records]
    if fmt == FORMAT_CSV:
        buffer = io.StringIO()
        if title:
            buffer.write(f"# {title}\n")
        for key, value in metadata.items():
            buffer.write(f"# {key}: {value}\n")
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        if columns:
            writer.writeheader()
            writer.writerows(cells)
        return buffer.getvalue()
    if fmt == FORMAT_MARKDOWN:
        return _env.get_template("table.md.j2").render(
            title=title or settings.APP_NAME,
            metadata=metadata,
            columns=columns,
            rows=cells,
        )
    raise ValueError(f"Unknown output format: {fmt}")


def write_output(text: str, out: str | None = None) -> None:
    """Write to a file, or to stdout when no path is given."""
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
