from __future__ import annotations

import random

import pytest

from sheetdoc.errors import ParseError
from sheetdoc.xwapi import CellRef, RangeRef, column_index, column_letters, parse_range


def test_column_round_trip():
    for index in [1, 2, 26, 27, 52, 53, 702, 703, 1000]:
        assert column_index(column_letters(index)) == index


def test_column_letters_known():
    assert column_letters(1) == "A"
    assert column_letters(26) == "Z"
    assert column_letters(27) == "AA"
    assert column_index("E") == 5


def test_parse_range_sheet_and_span():
    ref = parse_range("Sheet1!A1:E71")
    assert ref.sheet == "Sheet1"
    assert (ref.start.column, ref.start.row) == (1, 1)
    assert (ref.end.column, ref.end.row) == (5, 71)
    assert ref.width == 5 and ref.height == 71


def test_parse_range_degenerate_cell():
    ref = parse_range("B7")
    assert ref.sheet is None
    assert ref.is_cell()
    assert (ref.start.column, ref.start.row) == (2, 7)


def test_parse_range_normalizes_reversed_corners():
    assert parse_range("Sheet1!E71:A1").a1() == "Sheet1!A1:E71"


def test_normalization_idempotent_and_renders_canonical():
    rng = random.Random(4)
    for _ in range(200):
        c1, r1 = rng.randint(1, 40), rng.randint(1, 99)
        c2, r2 = rng.randint(1, 40), rng.randint(1, 99)
        text = f"{column_letters(c1)}{r1}:{column_letters(c2)}{r2}"
        ref = parse_range(text)
        again = parse_range(ref.a1())
        assert again == ref
        assert again.a1() == ref.a1()
        assert ref.start.column <= ref.end.column
        assert ref.start.row <= ref.end.row


def test_quoted_sheet_names_render_and_parse():
    ref = parse_range("'Weekly Data'!B2:C3")
    assert ref.sheet == "Weekly Data"
    assert ref.a1() == "'Weekly Data'!B2:C3"
    assert parse_range(ref.a1()) == ref


def test_malformed_inputs_raise():
    for bad in ["", "Sheet1!", "1A", "A0", "A1:B", "!!A1"]:
        with pytest.raises(ParseError):
            parse_range(bad)


def test_cellref_invariants():
    with pytest.raises(ValueError):
        CellRef(0, 1)
    with pytest.raises(ValueError):
        CellRef(1, 0)
    assert CellRef(2, 7).a1() == "B7"
    assert CellRef(2, 7, "Weekly Data").a1() == "'Weekly Data'!B7"


def test_range_contains_and_cells_order():
    outer = parse_range("A1:C3")
    inner = parse_range("B2")
    assert outer.contains(inner)
    assert not inner.contains(outer)
    assert list(parse_range("A1:B2").cells()) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_rangeref_single_cell_constructor():
    assert RangeRef.cell(3, 4, "Sheet1").a1() == "Sheet1!C4"
