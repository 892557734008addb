from __future__ import annotations

import copy
import random

import pytest

from sheetdoc.engine import (
    FormulaCell,
    Sheet,
    Workbook,
    compare,
    execute,
    read_cell,
)
from sheetdoc.errors import ExecError
from sheetdoc.xwapi import parse_script


def run(text, catalog, book=None):
    book = book or Workbook.blank()
    return execute(parse_script(text, catalog), book)


@pytest.fixture
def sales_book():
    book = Workbook.blank()
    book.set_cell("Sheet1", 1, 1, "Week")
    book.set_cell("Sheet1", 2, 1, "Sales")
    book.set_cell("Sheet1", 3, 1, "COGS")
    for row in range(2, 12):
        book.set_cell("Sheet1", 1, row, f"Week {row - 1}")
        book.set_cell("Sheet1", 2, row, 100.0 + row)
        book.set_cell("Sheet1", 3, row, 40.0 + row / 2)
    return book


def test_write_value_and_formula(catalog, sales_book):
    run('- - Write(range="Sheet1!D2", value="=B2-C2")', catalog, sales_book)
    assert read_cell(sales_book, "Sheet1", 4, 2) == pytest.approx(102.0 - 41.0)


def test_write_fills_whole_range(catalog):
    book = run('- - Write(range="Sheet1!A1:B2", value=5)', catalog)
    for col, row in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        assert read_cell(book, "Sheet1", col, row) == 5.0


def test_autofill_adjusts_relative_references(catalog, sales_book):
    run('- - Write(range="Sheet1!D2", value="=B2-C2")\n'
        '- - AutoFill(source="Sheet1!D2", destination="Sheet1!D2:D11")',
        catalog, sales_book)
    assert sales_book.raw_cell("Sheet1", 4, 11).source == "=B11-C11"
    for row in range(2, 12):
        expected = (100.0 + row) - (40.0 + row / 2)
        assert read_cell(sales_book, "Sheet1", 4, row) == pytest.approx(expected)


def test_autofill_requires_source_inside_destination(catalog, sales_book):
    with pytest.raises(ExecError, match="AutoFill"):
        run('- - AutoFill(source="Sheet1!A1", destination="Sheet1!B2:B5")',
            catalog, sales_book)


def test_create_sheet_appends(catalog):
    book = run('- - CreateSheet(sheetName="Sheet2")', catalog)
    assert [s.name for s in book.sheets] == ["Sheet1", "Sheet2"]


def test_create_sheet_duplicate_fails(catalog):
    with pytest.raises(ExecError, match="already exists"):
        run('- - CreateSheet(sheetName="sheet1")', catalog)


def test_copy_paste_shifts_formulas_and_values(catalog):
    book = Workbook.blank()
    book.set_cell("Sheet1", 1, 1, "Hello")
    book.set_cell("Sheet1", 1, 2, 7.0)
    book.set_cell("Sheet1", 1, 3, "=A2*2")
    run('- - CopyPaste(source="Sheet1!A1:A5", destination="Sheet1!B1:B5")',
        catalog, book)
    assert read_cell(book, "Sheet1", 2, 1) == "Hello"
    assert read_cell(book, "Sheet1", 2, 2) == 7.0
    assert book.raw_cell("Sheet1", 2, 3).source == "=B2*2"
    assert read_cell(book, "Sheet1", 2, 3) == 14.0
    assert read_cell(book, "Sheet1", 2, 4) is None


def test_copy_paste_cross_sheet(catalog):
    book = Workbook.blank()
    book.set_cell("Sheet1", 1, 1, 3.0)
    run('- - CreateSheet(sheetName="Sheet2")\n'
        '- - CopyPaste(source="Sheet1!A1", destination="Sheet2!C4")',
        catalog, book)
    assert read_cell(book, "Sheet2", 3, 4) == 3.0


def test_missing_sheet_raises_with_step_index(catalog):
    with pytest.raises(ExecError) as excinfo:
        run('- - CreateSheet(sheetName="Extra")\n'
            '- - Write(range="Nope!A1", value=1)', catalog)
    assert excinfo.value.step_index == 1


def test_chart_and_legend(catalog, sales_book):
    run('- - CreateChart(source="Sheet1!A1:C11", destSheet="Sheet1", '
        'chartType="Line", chartName="Weekly Trends")\n'
        '- - SetChartLegend(chartName="Weekly Trends", position="bottom")',
        catalog, sales_book)
    chart = sales_book.sheets[0].charts[0]
    assert chart.chart_type == "Line"
    assert chart.legend_position == "bottom"
    assert chart.source.a1() == "Sheet1!A1:C11"


def test_duplicate_chart_name_fails(catalog, sales_book):
    text = ('- - CreateChart(source="Sheet1!A1:C11", destSheet="Sheet1", '
            'chartType="Line", chartName="X")\n')
    run(text, catalog, sales_book)
    with pytest.raises(ExecError, match="already exists"):
        run(text, catalog, sales_book)


def test_unknown_chart_type_stored_verbatim(catalog, sales_book, caplog):
    import logging

    with caplog.at_level(logging.WARNING):
        run('- - CreateChart(source="Sheet1!A1:C11", destSheet="Sheet1", '
            'chartType="Sunburst", chartName="S")', catalog, sales_book)
    assert sales_book.sheets[0].charts[0].chart_type == "Sunburst"
    assert any("Sunburst" in r.message for r in caplog.records)


def test_legend_for_missing_chart(catalog):
    with pytest.raises(ExecError, match="no chart named"):
        run('- - SetChartLegend(chartName="Ghost", position="top")', catalog)


def test_filter_records_metadata(catalog, sales_book):
    run('- - Filter(source="Sheet1!A1:C11", fieldIndex=2, criteria="<105")',
        catalog, sales_book)
    flt = sales_book.sheets[0].filters[0]
    assert (flt.field_index, flt.criteria) == (2, "<105")


def test_filter_field_out_of_range(catalog, sales_book):
    with pytest.raises(ExecError, match="fieldIndex"):
        run('- - Filter(source="Sheet1!A1:C11", fieldIndex=9, criteria="<1")',
            catalog, sales_book)


def test_pivot_table_fields(catalog, sales_book):
    run('- - CreatePivotTable(source="Sheet1!A1:C11", destSheet="Sheet1", '
        'name="P1", rows="Week", columns="", values="Sales,COGS")',
        catalog, sales_book)
    pivot = sales_book.sheets[0].pivots[0]
    assert pivot.rows == ("Week",)
    assert pivot.columns == ()
    assert pivot.values == ("Sales", "COGS")


def test_pivot_requires_some_fields(catalog, sales_book):
    with pytest.raises(ExecError, match="all empty"):
        run('- - CreatePivotTable(source="Sheet1!A1:C11", destSheet="Sheet1", '
            'name="P1", rows="", columns="", values="")', catalog, sales_book)


def test_set_format_records(catalog, sales_book):
    run('- - SetFormat(range="Sheet1!A1:C1", property="fontWeight", value="bold")',
        catalog, sales_book)
    fmt = sales_book.sheets[0].formats[0]
    assert (fmt.property, fmt.value) == ("fontWeight", "bold")


def test_freeze_panes_from_top_left(catalog, sales_book):
    run('- - FreezePanes(range="Sheet1!A2")', catalog, sales_book)
    assert sales_book.sheets[0].frozen == (1, 0)
    run('- - FreezePanes(range="Sheet1!C4")', catalog, sales_book)
    assert sales_book.sheets[0].frozen == (3, 2)


def test_unknown_actions_are_skipped(catalog):
    script = parse_script('- - Frobnicate(x=1)\n- - CreateSheet(sheetName="S")', catalog)
    book = execute(script, Workbook.blank())
    assert [s.name for s in book.sheets] == ["Sheet1", "S"]


def test_custom_catalog_action_has_no_semantics(catalog, tmp_path):
    defs = tmp_path / "x.defs"
    defs.write_text("Sparkle(range:range) -- add sparkles\n", encoding="utf-8")
    catalog = copy.deepcopy(catalog)
    catalog.load_definitions(defs)
    script = parse_script('- - Sparkle(range="Sheet1!A1")', catalog)
    with pytest.raises(ExecError, match="no execution semantics"):
        execute(script, Workbook.blank())


def test_execute_is_deterministic(catalog, sales_book):
    text = ('- - Write(range="Sheet1!D2", value="=B2-C2")\n'
            '- - AutoFill(source="Sheet1!D2", destination="Sheet1!D2:D11")\n'
            '- - CreateChart(source="Sheet1!A1:D11", destSheet="Sheet1", '
            'chartType="Line", chartName="T")')
    book_a = copy.deepcopy(sales_book)
    book_b = copy.deepcopy(sales_book)
    run(text, catalog, book_a)
    run(text, catalog, book_b)
    assert compare(book_a, book_b, 0.0).equivalent


def test_formula_cache_matches_full_recompute(catalog):
    rng = random.Random(5)
    book = Workbook.blank()
    for row in range(1, 6):
        book.set_cell("Sheet1", 1, row, float(rng.randint(1, 50)))
    book.set_cell("Sheet1", 2, 1, "=SUM(A1:A5)")
    book.set_cell("Sheet1", 2, 2, "=B1*2")
    for _ in range(20):
        col, row = 1, rng.randint(1, 5)
        book.set_cell("Sheet1", col, row, float(rng.randint(1, 50)))
        cached = read_cell(book, "Sheet1", 2, 2)
        # Oracle: rebuild the same state from scratch and evaluate cold.
        fresh = Workbook.blank()
        for r in range(1, 6):
            fresh.set_cell("Sheet1", 1, r, book.raw_cell("Sheet1", 1, r))
        fresh.set_cell("Sheet1", 2, 1, FormulaCell("=SUM(A1:A5)"))
        fresh.set_cell("Sheet1", 2, 2, FormulaCell("=B1*2"))
        assert cached == read_cell(fresh, "Sheet1", 2, 2)


def test_autofill_pattern_tiles_multi_cell_source(catalog):
    book = Workbook.blank()
    book.set_cell("Sheet1", 1, 1, 1.0)
    book.set_cell("Sheet1", 1, 2, 2.0)
    run('- - AutoFill(source="Sheet1!A1:A2", destination="Sheet1!A1:A6")',
        catalog, book)
    values = [read_cell(book, "Sheet1", 1, r) for r in range(1, 7)]
    assert values == [1.0, 2.0, 1.0, 2.0, 1.0, 2.0]
