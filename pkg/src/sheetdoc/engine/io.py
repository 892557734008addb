"""Workbook file format: a versioned JSON document.

Schema (version 1):

    {"version": 1,
     "sheets": [{"name": "Sheet1",
                 "cells": {"A1": {"t": "n", "v": 1.5},
                           "A2": {"t": "s", "v": "text"},
                           "A3": {"t": "b", "v": true},
                           "A4": {"t": "f", "src": "=A1*2", "v": 3.0}},
                 "charts": [...], "pivots": [...], "filters": [...],
                 "format": [...], "frozen": {"rows": 1, "cols": 0}}]}

Formula caches are written for readers but dropped on load and recomputed
lazily, so a load-save-load cycle is lossless for all modeled state.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import WorkbookFormatError
from ..xwapi.refs import RangeRef, column_letters, parse_range
from ..errors import ParseError
from .formula import read_cell
from .model import (
    ChartMeta,
    ErrorValue,
    FilterMeta,
    FormatMeta,
    FormulaCell,
    PivotMeta,
    Sheet,
    Workbook,
)

SCHEMA_VERSION = 1


def _cell_json(book: Workbook, sheet: Sheet, key: tuple[int, int], raw) -> dict:
    if isinstance(raw, FormulaCell):
        value = read_cell(book, sheet.name, key[0], key[1])
        if isinstance(value, ErrorValue):
            value = value.code
        return {"t": "f", "src": raw.source, "v": value}
    if isinstance(raw, bool):
        return {"t": "b", "v": raw}
    if isinstance(raw, (int, float)):
        return {"t": "n", "v": float(raw)}
    return {"t": "s", "v": raw}


def _range_json(ref: RangeRef) -> str:
    return ref.a1()


def _sheet_json(book: Workbook, sheet: Sheet) -> dict:
    cells = {}
    for key in sorted(sheet.cells, key=lambda k: (k[0], k[1])):
        a1 = f"{column_letters(key[0])}{key[1]}"
        cells[a1] = _cell_json(book, sheet, key, sheet.cells[key])
    doc = {
        "name": sheet.name,
        "cells": cells,
        "charts": [
            {"name": c.name, "chart_type": c.chart_type, "source": _range_json(c.source),
             "dest_sheet": c.dest_sheet, "legend_position": c.legend_position}
            for c in sheet.charts
        ],
        "pivots": [
            {"name": p.name, "source": _range_json(p.source), "dest_sheet": p.dest_sheet,
             "rows": list(p.rows), "columns": list(p.columns), "values": list(p.values)}
            for p in sheet.pivots
        ],
        "filters": [
            {"source": _range_json(f.source), "field_index": f.field_index,
             "criteria": f.criteria}
            for f in sheet.filters
        ],
        "format": [
            {"range": _range_json(f.range), "property": f.property, "value": f.value}
            for f in sheet.formats
        ],
    }
    if sheet.frozen is not None:
        doc["frozen"] = {"rows": sheet.frozen[0], "cols": sheet.frozen[1]}
    return doc


def save_workbook(book: Workbook, path: str | Path) -> None:
    doc = {
        "version": SCHEMA_VERSION,
        "sheets": [_sheet_json(book, sheet) for sheet in book.sheets],
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _parse_cell(a1: str, doc: dict, where: str):
    try:
        ref = parse_range(a1)
    except ParseError as exc:
        raise WorkbookFormatError(f"{where}: bad cell key {a1!r}: {exc}") from exc
    if not ref.is_cell() or ref.sheet is not None:
        raise WorkbookFormatError(f"{where}: cell key {a1!r} must be a bare single cell")
    tag = doc.get("t")
    value = doc.get("v")
    if tag == "n":
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise WorkbookFormatError(f"{where}:{a1}: numeric cell needs a number")
        parsed = float(value)
    elif tag == "s":
        if not isinstance(value, str):
            raise WorkbookFormatError(f"{where}:{a1}: string cell needs a string")
        parsed = value
    elif tag == "b":
        if not isinstance(value, bool):
            raise WorkbookFormatError(f"{where}:{a1}: boolean cell needs a boolean")
        parsed = value
    elif tag == "f":
        src = doc.get("src")
        if not isinstance(src, str) or not src.startswith("="):
            raise WorkbookFormatError(f"{where}:{a1}: formula cell needs a 'src' with '='")
        parsed = FormulaCell(src)
    else:
        raise WorkbookFormatError(f"{where}:{a1}: unknown cell tag {tag!r}")
    return (ref.start.column, ref.start.row), parsed


def _load_range(text, where: str) -> RangeRef:
    if not isinstance(text, str):
        raise WorkbookFormatError(f"{where}: range must be a string, got {text!r}")
    try:
        return parse_range(text)
    except ParseError as exc:
        raise WorkbookFormatError(f"{where}: bad range {text!r}: {exc}") from exc


def _load_sheet(doc: dict, index: int) -> Sheet:
    where = f"sheets[{index}]"
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise WorkbookFormatError(f"{where}: sheet needs a non-empty name")
    sheet = Sheet(name)
    for a1, cell_doc in (doc.get("cells") or {}).items():
        key, value = _parse_cell(a1, cell_doc, where)
        sheet.cells[key] = value
    for c in doc.get("charts") or []:
        sheet.charts.append(ChartMeta(
            c["name"], c["chart_type"], _load_range(c["source"], where),
            c["dest_sheet"], c.get("legend_position")))
    for p in doc.get("pivots") or []:
        sheet.pivots.append(PivotMeta(
            p["name"], _load_range(p["source"], where), p["dest_sheet"],
            tuple(p.get("rows") or ()), tuple(p.get("columns") or ()),
            tuple(p.get("values") or ())))
    for f in doc.get("filters") or []:
        sheet.filters.append(FilterMeta(
            _load_range(f["source"], where), int(f["field_index"]), f["criteria"]))
    for f in doc.get("format") or []:
        sheet.formats.append(FormatMeta(
            _load_range(f["range"], where), f["property"], f["value"]))
    frozen = doc.get("frozen")
    if frozen is not None:
        sheet.frozen = (int(frozen["rows"]), int(frozen["cols"]))
    return sheet


def load_workbook(path: str | Path) -> Workbook:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise WorkbookFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise WorkbookFormatError(f"{path}: workbook document must be an object")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise WorkbookFormatError(
            f"{path}: unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
    book = Workbook()
    try:
        for index, sheet_doc in enumerate(doc.get("sheets") or []):
            book.add_sheet(_load_sheet(sheet_doc, index))
    except (KeyError, TypeError, ValueError) as exc:
        raise WorkbookFormatError(f"{path}: malformed sheet entry: {exc}") from exc
    return book
