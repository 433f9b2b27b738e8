"""Tests for report rendering"""
import json

import pytest

from app.schemas.results import PrecisionPoint
from app.utils.formatting import FORMAT_CSV, FORMAT_JSON, FORMAT_MARKDOWN, format_cell, render, write_output

rows = [
    {"pair": "8,8", "up": "6", "ev": 0.5, "best": True},
    {"pair": "T,T", "up": "6", "ev": -0.25, "best": False, "note": None},
]
metadata = {"rules": "1D S17", "split_source": "exact"}

cell_cases = [
    (None, 3, ""),
    (True, 3, "yes"),
    (False, 3, "no"),
    (0.5, 3, "+0.500"),
    (-0.25, 2, "-0.25"),
    (7, 3, "7"),
    ("h2_ND", 3, "h2_ND"),
]


@pytest.mark.parametrize("value, decimals, expected", cell_cases)
def test_format_cell(value, decimals, expected):
    assert format_cell(value, decimals) == expected


def test_csv_has_metadata_header():
    text = render(rows, FORMAT_CSV, metadata, title="Split EVs", decimals=4)
    lines = text.splitlines()
    assert lines[:3] == ["# Split EVs", "# rules: 1D S17", "# split_source: exact"]
    assert lines[3] == "pair,up,ev,best,note"
    assert lines[4] == "\"8,8\",6,+0.5000,yes,"
    assert lines[5] == "\"T,T\",6,-0.2500,no,"


def test_json_keeps_numbers():
    data = json.loads(render(rows, FORMAT_JSON, metadata, title="Split EVs"))
    assert data["title"] == "Split EVs"
    assert data["metadata"] == metadata
    assert data["rows"][1]["ev"] == -0.25
    assert data["rows"][0]["best"] is True


def test_markdown_table():
    text = render(rows, FORMAT_MARKDOWN, metadata, title="Split EVs", decimals=2)
    assert text.startswith("# Split EVs\n")
    assert "- **rules**: 1D S17" in text
    assert "| pair | up | ev | best | note |" in text
    assert "| --- | --- | --- | --- | --- |" in text
    assert "| 8,8 | 6 | +0.50 | yes |  |" in text


def test_markdown_without_rows():
    assert "_No rows._" in render([], FORMAT_MARKDOWN)


def test_models_are_rendered():
    points = [PrecisionPoint(digits=3, value=0.01, deviation=-0.0001)]
    text = render(points, FORMAT_CSV, decimals=4)
    assert text.splitlines() == ["digits,value,deviation", "3,+0.0100,-0.0001"]


def test_unknown_format():
    with pytest.raises(ValueError):
        render(rows, "xml")


def test_write_output(tmp_path, capsys):
    target = tmp_path / "reports" / "table.csv"
    write_output("a,b\n", str(target))
    assert target.read_text(encoding="utf-8") == "a,b\n"
    write_output("to stdout\n")
    assert capsys.readouterr().out == "to stdout\n"
