from __future__ import annotations

import random

import pytest

from sheetdoc.engine import ErrorValue, Workbook, evaluate_formula, read_cell, shift_formula
from sheetdoc.engine.model import ERR_CYCLE, ERR_REF, ERR_VALUE

from oracles import shift_refs_oracle


@pytest.fixture
def book():
    wb = Workbook.blank()
    wb.set_cell("Sheet1", 2, 2, 10.0)  # B2
    wb.set_cell("Sheet1", 3, 2, 4.0)   # C2
    wb.set_cell("Sheet1", 1, 1, 1.0)   # A1
    wb.set_cell("Sheet1", 1, 2, 2.0)   # A2
    wb.set_cell("Sheet1", 1, 3, 3.0)   # A3
    return wb


def test_subtraction(book):
    assert evaluate_formula(book, "Sheet1", "=B2-C2") == 6.0


def test_sum_over_range(book):
    assert evaluate_formula(book, "Sheet1", "=SUM(A1:A3)") == 6.0


def test_cross_sheet_mirror(book):
    assert evaluate_formula(book, "Sheet1", "=Sheet1!B2") == 10.0


def test_precedence_and_parentheses(book):
    assert evaluate_formula(book, "Sheet1", "=1+2*3") == 7.0
    assert evaluate_formula(book, "Sheet1", "=(1+2)*3") == 9.0
    assert evaluate_formula(book, "Sheet1", "=2^3^2") == 512.0  # right-assoc
    assert evaluate_formula(book, "Sheet1", "=-2^2") == -4.0
    assert evaluate_formula(book, "Sheet1", "=10/4") == 2.5


def test_functions(book):
    assert evaluate_formula(book, "Sheet1", "=AVERAGE(A1:A3)") == 2.0
    assert evaluate_formula(book, "Sheet1", "=MIN(A1:A3)") == 1.0
    assert evaluate_formula(book, "Sheet1", "=MAX(A1:A3)") == 3.0
    assert evaluate_formula(book, "Sheet1", "=COUNT(A1:B3)") == 4.0
    assert evaluate_formula(book, "Sheet1", "=SUM(A1:A3, 4)") == 10.0


def test_empty_cells_coerce_to_zero(book):
    assert evaluate_formula(book, "Sheet1", "=Z99+5") == 5.0


def test_text_in_arithmetic_is_value_error(book):
    book.set_cell("Sheet1", 4, 1, "label")
    result = evaluate_formula(book, "Sheet1", "=D1+1")
    assert isinstance(result, ErrorValue) and result.code == ERR_VALUE


def test_unknown_function_name_in_message(book):
    result = evaluate_formula(book, "Sheet1", "=MEDIAN(A1:A3)")
    assert isinstance(result, ErrorValue)
    assert result.code == ERR_VALUE
    assert "MEDIAN" in result.detail


def test_missing_sheet_is_ref_error(book):
    result = evaluate_formula(book, "Sheet1", "=Nope!A1")
    assert isinstance(result, ErrorValue) and result.code == ERR_REF


def test_cycle_detection(book):
    book.set_cell("Sheet1", 6, 1, "=F2")
    book.set_cell("Sheet1", 6, 2, "=F1")
    result = read_cell(book, "Sheet1", 6, 1)
    assert isinstance(result, ErrorValue) and result.code == ERR_CYCLE


def test_self_cycle(book):
    book.set_cell("Sheet1", 7, 1, "=G1+1")
    result = read_cell(book, "Sheet1", 7, 1)
    assert isinstance(result, ErrorValue) and result.code == ERR_CYCLE


def test_division_by_zero(book):
    result = evaluate_formula(book, "Sheet1", "=1/0")
    assert isinstance(result, ErrorValue) and result.code == ERR_VALUE


def test_nested_formula_chain(book):
    book.set_cell("Sheet1", 4, 2, "=B2-C2")    # D2 = 6
    book.set_cell("Sheet1", 5, 2, "=D2*2")     # E2 = 12
    assert read_cell(book, "Sheet1", 5, 2) == 12.0


def test_cache_coherence_after_write(book):
    book.set_cell("Sheet1", 4, 2, "=B2-C2")
    assert read_cell(book, "Sheet1", 4, 2) == 6.0
    book.set_cell("Sheet1", 2, 2, 100.0)
    assert read_cell(book, "Sheet1", 4, 2) == 96.0


def test_dollar_markers_treated_as_relative(book):
    assert evaluate_formula(book, "Sheet1", "=$B$2-C2") == 6.0


def test_string_literal_evaluates_to_text(book):
    assert evaluate_formula(book, "Sheet1", '="hello"') == "hello"


def test_shift_formula_basic():
    assert shift_formula("=B2-C2", 9, 0) == "=B11-C11"
    assert shift_formula("=SUM(A1:A3)", 0, 2) == "=SUM(C1:C3)"


def test_shift_formula_off_sheet_becomes_ref_error():
    assert "#REF" in shift_formula("=A1+B2", -1, 0)


def test_shift_matches_offset_oracle_200_cases():
    rng = random.Random(99)
    from sheetdoc.xwapi import column_letters

    for _ in range(200):
        terms = []
        for _ in range(rng.randint(1, 4)):
            col = rng.randint(1, 20)
            row = rng.randint(1, 50)
            terms.append(f"{column_letters(col)}{row}")
        formula = "=" + "+".join(terms)
        rows = rng.randint(-3, 15)
        cols = rng.randint(-3, 8)
        assert shift_formula(formula, rows, cols) == shift_refs_oracle(formula, rows, cols)
