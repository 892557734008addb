from __future__ import annotations

import copy
import random

from sheetdoc.engine import ChartMeta, FilterMeta, Sheet, Workbook, compare
from sheetdoc.xwapi import parse_range


def random_book(rng: random.Random) -> Workbook:
    book = Workbook()
    for s in range(rng.randint(1, 3)):
        sheet = Sheet(f"Sheet{s + 1}")
        for _ in range(rng.randint(0, 12)):
            col, row = rng.randint(1, 6), rng.randint(1, 9)
            value = rng.choice([rng.uniform(0, 100), "text", True, 3])
            sheet.cells[(col, row)] = value if not isinstance(value, int) else float(value)
        if rng.random() < 0.4:
            sheet.charts.append(ChartMeta(
                f"chart{s}", "Line", parse_range("A1:B5"), sheet.name, "bottom"))
        if rng.random() < 0.4:
            sheet.frozen = (1, 0)
        book.add_sheet(sheet)
    return book


def test_reflexivity_on_random_books():
    rng = random.Random(11)
    for _ in range(50):
        book = random_book(rng)
        assert compare(book, book, 0.0).equivalent


def test_tolerance_accepts_close_numbers():
    a = Workbook.blank()
    b = Workbook.blank()
    a.set_cell("Sheet1", 4, 2, 6.0)
    b.set_cell("Sheet1", 4, 2, 6.0000001)
    assert compare(a, b, 1e-4).equivalent
    assert not compare(a, b, 1e-9).equivalent


def test_chart_missing_is_one_mismatch():
    a = Workbook.blank()
    b = Workbook.blank()
    a.sheets[0].charts.append(
        ChartMeta("Weekly Trends", "Line", parse_range("Sheet1!A1:D11"), "Sheet1", "bottom"))
    report = compare(a, b, 1e-6)
    assert not report.equivalent
    assert len(report.mismatches) == 1
    assert report.mismatches[0].kind == "chart"
    assert "Weekly Trends" in report.mismatches[0].location


def test_chart_attribute_difference():
    a = Workbook.blank()
    b = Workbook.blank()
    a.sheets[0].charts.append(ChartMeta("C", "Line", parse_range("A1:B2"), "Sheet1", "bottom"))
    b.sheets[0].charts.append(ChartMeta("C", "Bar", parse_range("A1:B2"), "Sheet1", "bottom"))
    report = compare(a, b, 1e-6)
    assert [m.kind for m in report.mismatches] == ["chart"]


def test_sheet_missing_both_directions():
    a = Workbook([Sheet("Sheet1"), Sheet("Extra")])
    b = Workbook([Sheet("Sheet1"), Sheet("Other")])
    kinds = [m.kind for m in compare(a, b, 0.0).mismatches]
    assert kinds.count("sheet-missing") == 2


def test_verdict_symmetric_for_same_sheet_sets():
    rng = random.Random(23)
    for _ in range(40):
        a = random_book(rng)
        b = copy.deepcopy(a)
        if rng.random() < 0.5 and b.sheets[0].cells:
            key = next(iter(b.sheets[0].cells))
            b.sheets[0].cells[key] = 12345.0
        assert compare(a, b, 1e-9).equivalent == compare(b, a, 1e-9).equivalent


def test_filters_compared_as_multisets():
    a = Workbook.blank()
    b = Workbook.blank()
    a.sheets[0].filters.append(FilterMeta(parse_range("Sheet1!A1:E71"), 3, "<2000"))
    b.sheets[0].filters.append(FilterMeta(parse_range("Sheet1!A1:E71"), 3, "<2000"))
    assert compare(a, b, 0.0).equivalent
    b.sheets[0].filters.append(FilterMeta(parse_range("Sheet1!A1:E71"), 2, ">5"))
    report = compare(a, b, 0.0)
    assert [m.kind for m in report.mismatches] == ["filter"]


def test_frozen_pane_mismatch():
    a = Workbook.blank()
    b = Workbook.blank()
    a.sheets[0].frozen = (1, 0)
    report = compare(a, b, 0.0)
    assert [m.kind for m in report.mismatches] == ["frozen-pane"]


def test_sheet_names_compare_case_insensitively():
    a = Workbook([Sheet("Sheet1")])
    b = Workbook([Sheet("SHEET1")])
    assert compare(a, b, 0.0).equivalent


def test_formula_cells_compare_by_evaluated_value():
    a = Workbook.blank()
    b = Workbook.blank()
    a.set_cell("Sheet1", 1, 1, 2.0)
    a.set_cell("Sheet1", 2, 1, "=A1*3")
    b.set_cell("Sheet1", 1, 1, 2.0)
    b.set_cell("Sheet1", 2, 1, 6.0)
    assert compare(a, b, 1e-9).equivalent


def test_extra_cell_in_actual_is_reported():
    a = Workbook.blank()
    b = Workbook.blank()
    b.set_cell("Sheet1", 5, 5, "stray")
    report = compare(a, b, 0.0)
    assert [m.kind for m in report.mismatches] == ["cell"]
    assert report.mismatches[0].location == "Sheet1!E5"
    assert report.mismatches[0].expected is None
    assert report.mismatches[0].actual == "stray"


def test_type_difference_is_mismatch():
    a = Workbook.blank()
    b = Workbook.blank()
    a.set_cell("Sheet1", 1, 1, "5")
    b.set_cell("Sheet1", 1, 1, 5.0)
    assert not compare(a, b, 1.0).equivalent
