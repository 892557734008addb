"""Workbook equivalence checking.

Walks every sheet, comparing cell values column by column (numbers within
an absolute tolerance, text exact, formulas by evaluated value), then
chart, pivot, filter, and format metadata, and finally frozen panes. Each
discrepancy becomes one mismatch entry; missing sheets on either side are
reported rather than raised.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .formula import read_cell
from .model import ErrorValue, Sheet, Workbook, cell_location

KINDS = ("cell", "chart", "pivot", "filter", "format", "frozen-pane", "sheet-missing")


@dataclass(frozen=True)
class Mismatch:
    kind: str
    location: str
    expected: object
    actual: object

    def __str__(self) -> str:
        return f"{self.kind} @ {self.location}: expected {self.expected!r}, got {self.actual!r}"


@dataclass
class DiffReport:
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return not self.mismatches


def _values_match(expected, actual, tol: float) -> bool:
    if isinstance(expected, bool) or isinstance(actual, bool):
        return expected is actual if isinstance(expected, bool) and isinstance(actual, bool) else False
    if isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        return abs(expected - actual) <= tol
    if isinstance(expected, ErrorValue) and isinstance(actual, ErrorValue):
        return expected.code == actual.code
    return expected == actual


def _display(value):
    if value is None:
        return None
    if isinstance(value, ErrorValue):
        return value.code
    return value


def _compare_cells(expected: Workbook, actual: Workbook, exp: Sheet, act: Sheet,
                   tol: float, out: list[Mismatch]) -> None:
    exp_cols, exp_rows = exp.used_range()
    act_cols, act_rows = act.used_range()
    for col in range(1, max(exp_cols, act_cols) + 1):
        for row in range(1, max(exp_rows, act_rows) + 1):
            want = read_cell(expected, exp.name, col, row)
            got = read_cell(actual, act.name, col, row)
            if want is None and got is None:
                continue
            if not _values_match(want, got, tol):
                out.append(Mismatch("cell", cell_location(exp.name, col, row),
                                    _display(want), _display(got)))


def _chart_key(chart) -> str:
    return chart.name


def _chart_desc(chart) -> tuple:
    return (chart.chart_type, chart.source.a1(), chart.dest_sheet, chart.legend_position)


def _pivot_desc(pivot) -> tuple:
    return (pivot.source.a1(), pivot.dest_sheet, pivot.rows, pivot.columns, pivot.values)


def _compare_named(kind: str, sheet_name: str, expected: dict, actual: dict,
                   describe, out: list[Mismatch]) -> None:
    for name in sorted(set(expected) | set(actual)):
        want = expected.get(name)
        got = actual.get(name)
        location = f"{sheet_name}:{name}"
        if want is None or got is None:
            out.append(Mismatch(kind, location,
                                describe(want) if want else None,
                                describe(got) if got else None))
        elif describe(want) != describe(got):
            out.append(Mismatch(kind, location, describe(want), describe(got)))


def _compare_multiset(kind: str, sheet_name: str, expected: Counter, actual: Counter,
                      out: list[Mismatch]) -> None:
    for entry in sorted((expected - actual).elements()):
        out.append(Mismatch(kind, sheet_name, entry, None))
    for entry in sorted((actual - expected).elements()):
        out.append(Mismatch(kind, sheet_name, None, entry))


def compare(expected: Workbook, actual: Workbook, tol: float = 1e-6) -> DiffReport:
    """Compare two workbooks; tol is the absolute numeric tolerance."""
    if tol < 0:
        raise ValueError("tolerance must be >= 0")
    report = DiffReport()
    expected_names = {s.name.lower(): s for s in expected.sheets}
    actual_names = {s.name.lower(): s for s in actual.sheets}
    for sheet in expected.sheets:
        if sheet.name.lower() not in actual_names:
            report.mismatches.append(Mismatch("sheet-missing", sheet.name, sheet.name, None))
    for sheet in actual.sheets:
        if sheet.name.lower() not in expected_names:
            report.mismatches.append(Mismatch("sheet-missing", sheet.name, None, sheet.name))

    for sheet in expected.sheets:
        other = actual_names.get(sheet.name.lower())
        if other is None:
            continue
        _compare_cells(expected, actual, sheet, other, tol, report.mismatches)
        _compare_named("chart", sheet.name,
                       {c.name: c for c in sheet.charts},
                       {c.name: c for c in other.charts},
                       _chart_desc, report.mismatches)
        _compare_named("pivot", sheet.name,
                       {p.name: p for p in sheet.pivots},
                       {p.name: p for p in other.pivots},
                       _pivot_desc, report.mismatches)
        _compare_multiset(
            "filter", sheet.name,
            Counter((f.source.a1(), f.field_index, f.criteria) for f in sheet.filters),
            Counter((f.source.a1(), f.field_index, f.criteria) for f in other.filters),
            report.mismatches)
        _compare_multiset(
            "format", sheet.name,
            Counter((f.range.a1(), f.property, str(f.value)) for f in sheet.formats),
            Counter((f.range.a1(), f.property, str(f.value)) for f in other.formats),
            report.mismatches)
        if sheet.frozen != other.frozen:
            report.mismatches.append(
                Mismatch("frozen-pane", sheet.name, sheet.frozen, other.frozen))
    return report
