from __future__ import annotations

from sheetdoc.xwapi import parse_script, validate_script
from sheetdoc.xwapi.validate import ERROR, WARNING, has_errors

from test_parser import PROFIT_BLOCK


def _diags(text, catalog):
    return validate_script(parse_script(text, catalog), catalog)


def test_missing_required_argument(catalog):
    diags = _diags('- - Write(range="Sheet1!A1")', catalog)
    assert len(diags) == 1
    assert diags[0].severity == ERROR
    assert diags[0].message == "missing required argument value"
    assert diags[0].step == 0


def test_valid_profit_block_yields_no_diagnostics(catalog):
    assert _diags(PROFIT_BLOCK, catalog) == []


def test_unknown_action_is_a_warning(catalog):
    diags = _diags("- - Frobnicate(x=1)", catalog)
    assert len(diags) == 1
    assert diags[0].severity == WARNING
    assert "unknown action" in diags[0].message
    assert not has_errors(diags)


def test_type_mismatch_number_for_string(catalog):
    diags = _diags('- - CreateSheet(sheetName=7)', catalog)
    assert any(d.severity == ERROR and "sheetName" in d.message for d in diags)


def test_malformed_range_string(catalog):
    diags = _diags('- - Write(range="NotARange!!", value=1)', catalog)
    assert any(d.severity == ERROR and "malformed range" in d.message for d in diags)


def test_number_expected(catalog):
    diags = _diags('- - Filter(source="Sheet1!A1:E71", fieldIndex="three", criteria="<1")',
                   catalog)
    assert any(d.severity == ERROR and "fieldIndex" in d.message for d in diags)


def test_unexpected_argument_warns(catalog):
    diags = _diags('- - CreateSheet(sheetName="S", color="red")', catalog)
    assert any(d.severity == WARNING and "unexpected argument color" in d.message
               for d in diags)
    assert not has_errors(diags)


def test_absolute_reference_in_formula_warns(catalog):
    diags = _diags('- - Write(range="Sheet1!A1", value="=$B$2-C2")', catalog)
    assert any(d.severity == WARNING and "$" in d.message for d in diags)
    assert not has_errors(diags)


def test_diagnostics_carry_step_indices(catalog):
    text = (
        '- - Write(range="Sheet1!A1", value=1)\n'
        '- - Write(range="Sheet1!A2")\n'
        '- - Frobnicate(x=1)\n'
    )
    diags = _diags(text, catalog)
    assert {(d.step, d.severity) for d in diags} == {(1, ERROR), (2, WARNING)}
