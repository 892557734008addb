from __future__ import annotations

import random

import pytest

from sheetdoc.errors import ParseError
from sheetdoc.xwapi import (
    Formula,
    RangeRef,
    parse_script,
    serialize_script,
    validate_script,
)

from conftest import random_script

PROFIT_BLOCK = """\
- - Write(range="Sheet1!D1", value="Profit")
- - Write(range="Sheet1!D2", value="=B2-C2")
- - AutoFill(source="Sheet1!D2", destination="Sheet1!D2:D11")
- - CreateChart(source="Sheet1!A1:D11", destSheet="Sheet1", chartType="Line", chartName="Weekly Trends")
- - SetChartLegend(chartName="Weekly Trends", position="bottom")
"""


def test_single_write_line(catalog):
    script = parse_script('- - Write(range="Sheet2!A1", value="Customers")', catalog)
    assert len(script.steps) == 1
    action = script.steps[0]
    assert action.name == "Write"
    assert action.get("range") == RangeRef.cell(1, 1, "Sheet2")
    assert action.get("value") == "Customers"
    assert not action.unknown


def test_empty_script_raises(catalog):
    with pytest.raises(ParseError, match="empty script"):
        parse_script("", catalog)
    with pytest.raises(ParseError, match="empty script"):
        parse_script("\n\n   \n", catalog)


def test_profit_block_has_five_groups(catalog):
    script = parse_script(PROFIT_BLOCK, catalog)
    assert len(script.steps) == 5
    assert len(script.step_groups) == 5
    assert [a.name for a in script.steps] == [
        "Write", "Write", "AutoFill", "CreateChart", "SetChartLegend"]
    assert script.steps[1].get("value") == Formula("=B2-C2")


def test_bullet_nesting_groups(catalog):
    text = (
        '- - Write(range="Sheet2!A1", value="Customers")\n'
        '  - Write(range="Sheet2!B1", value="Seattle")\n'
        '  - Write(range="Sheet2!C1", value="Milwaukee")\n'
        '- - CreateSheet(sheetName="Sheet3")\n'
    )
    script = parse_script(text, catalog)
    assert script.step_groups == ((0, 1, 2), (3,))


def test_blank_and_elision_lines_ignored(catalog):
    text = (
        '- - Write(range="Sheet2!A1", value="a")\n'
        "\n"
        ".\n"
        '- - Write(range="Sheet2!B1", value="b")\n'
    )
    script = parse_script(text, catalog)
    assert len(script.steps) == 2


def test_multiline_string_joins_with_single_space(catalog):
    text = (
        '- - CreateChart(source="Sheet1!A1:D11", destSheet="Sheet1", '
        'chartType="Line", chartName="Weekly\n    Trends")'
    )
    script = parse_script(text, catalog)
    assert script.steps[0].get("chartName") == "Weekly Trends"


def test_unknown_action_is_flagged_not_fatal(catalog):
    script = parse_script("- - Frobnicate(x=1)", catalog)
    assert script.steps[0].unknown
    assert script.steps[0].get("x") == 1


def test_syntax_error_carries_position(catalog):
    with pytest.raises(ParseError) as excinfo:
        parse_script('- - Write(range="Sheet1!A1" value=1)', catalog)
    assert excinfo.value.line == 1
    assert excinfo.value.column > 0


def test_duplicate_argument_rejected(catalog):
    with pytest.raises(ParseError, match="duplicate"):
        parse_script('- - Write(range="Sheet1!A1", range="Sheet1!B1")', catalog)


def test_create_sheet_name_alias_normalized(catalog):
    script = parse_script('- - CreateSheet(name="Sheet2")', catalog)
    assert script.steps[0].get("sheetName") == "Sheet2"
    canonical = parse_script('- - CreateSheet(sheetName="Sheet2")', catalog)
    assert script == canonical


def test_numbers_parse_typed(catalog):
    script = parse_script('- - Filter(source="Sheet1!A1:E71", fieldIndex=3, criteria="<2000")', catalog)
    action = script.steps[0]
    assert action.get("fieldIndex") == 3
    assert isinstance(action.get("fieldIndex"), int)
    assert action.get("criteria") == "<2000"


def test_escaped_quotes_round_trip(catalog):
    script = parse_script('- - Write(range="Sheet1!A1", value="say \\"hi\\"")', catalog)
    assert script.steps[0].get("value") == 'say "hi"'
    assert parse_script(serialize_script(script), catalog) == script


def test_serialize_one_write(catalog):
    script = parse_script('- - Write(range="Sheet2!A1", value="Customers")', catalog)
    assert serialize_script(script) == '- - Write(range="Sheet2!A1", value="Customers")'


def test_default_grouping_one_group_per_step(catalog):
    from sheetdoc.xwapi import ActionArg, ActionScript, AtomicAction

    steps = (
        AtomicAction("CreateSheet", (ActionArg("sheetName", "A"),)),
        AtomicAction("CreateSheet", (ActionArg("sheetName", "B"),)),
    )
    script = ActionScript(steps)
    assert script.step_groups == ((0,), (1,))
    assert serialize_script(script).splitlines() == [
        '- - CreateSheet(sheetName="A")',
        '- - CreateSheet(sheetName="B")',
    ]


def test_round_trip_100_generated_scripts(catalog):
    rng = random.Random(1234)
    for _ in range(100):
        script = random_script(rng, catalog)
        assert parse_script(serialize_script(script), catalog) == script


def test_round_trip_corpus_code_blocks(catalog, corpus):
    for instance in corpus.instances:
        script = parse_script(instance.code, catalog)
        assert parse_script(serialize_script(script), catalog) == script


def test_corpus_has_no_error_diagnostics(catalog, corpus):
    for instance in corpus.instances:
        script = parse_script(instance.code, catalog)
        errors = [d for d in validate_script(script, catalog) if d.severity == "error"]
        assert errors == [], instance.id


def test_n_lines_yield_n_actions(catalog):
    rng = random.Random(77)
    for _ in range(30):
        script = random_script(rng, catalog)
        text = serialize_script(script)
        lines = [ln for ln in text.splitlines() if ln.strip()]
        assert len(parse_script(text, catalog).steps) == len(lines)
