from __future__ import annotations

import pytest

from sheetdoc.errors import CatalogError
from sheetdoc.xwapi import ActionCatalog, seed_catalog
from sheetdoc.xwapi.catalog import SEED_ENTRIES

ATTESTED = {"Write", "CopyPaste", "CreateSheet", "AutoFill", "CreateChart",
            "SetChartLegend", "Filter"}
EXTENSIONS = {"CreatePivotTable", "SetFormat", "FreezePanes"}


def test_seed_contains_exactly_the_ten_actions():
    names = {entry.name for entry in SEED_ENTRIES}
    assert names == ATTESTED | EXTENSIONS
    assert len(SEED_ENTRIES) == 10


def test_seed_signatures():
    catalog = seed_catalog()
    assert catalog.get("Write").required_keys() == ("range", "value")
    assert catalog.get("CopyPaste").required_keys() == ("source", "destination")
    assert catalog.get("CreateSheet").required_keys() == ("sheetName",)
    assert catalog.get("AutoFill").required_keys() == ("source", "destination")
    assert catalog.get("CreateChart").required_keys() == (
        "source", "destSheet", "chartType", "chartName")
    assert catalog.get("SetChartLegend").required_keys() == ("chartName", "position")
    assert catalog.get("Filter").required_keys() == ("source", "fieldIndex", "criteria")
    assert catalog.get("FreezePanes").required_keys() == ("range",)


def test_alias_only_on_create_sheet():
    catalog = seed_catalog()
    assert catalog.canonical_key("CreateSheet", "name") == "sheetName"
    assert catalog.canonical_key("Write", "name") == "name"


def test_definitions_file_loading(tmp_path):
    path = tmp_path / "extra.defs"
    path.write_text(
        "# comment line\n"
        "SortRange(range:range, order?:str) -- Sort a range in place\n"
        "Merge(range:range) -- Merge the range\n",
        encoding="utf-8")
    catalog = seed_catalog()
    assert catalog.load_definitions(path) == 2
    entry = catalog.get("SortRange")
    assert entry.required_keys() == ("range",)
    assert entry.arg_spec("order").required is False
    assert entry.doc == "Sort a range in place"
    assert "Merge" in catalog


def test_collision_with_seed_is_an_error(tmp_path):
    path = tmp_path / "bad.defs"
    path.write_text("Write(range:range, value:any) -- mine now\n", encoding="utf-8")
    catalog = seed_catalog()
    with pytest.raises(CatalogError, match="already defined"):
        catalog.load_definitions(path)


def test_malformed_definition_line(tmp_path):
    path = tmp_path / "bad.defs"
    path.write_text("NotASignature\n", encoding="utf-8")
    with pytest.raises(CatalogError, match="malformed"):
        seed_catalog().load_definitions(path)


def test_unknown_arg_type_rejected(tmp_path):
    path = tmp_path / "bad.defs"
    path.write_text("Thing(x:blob) -- ?\n", encoding="utf-8")
    with pytest.raises(CatalogError):
        seed_catalog().load_definitions(path)


def test_signature_rendering():
    entry = seed_catalog().get("Filter")
    assert entry.signature() == "Filter(source: range, fieldIndex: number, criteria: str)"


def test_empty_catalog_flags_everything_unknown():
    from sheetdoc.xwapi import parse_script

    empty = ActionCatalog(())
    script = parse_script('- - Write(range="Sheet1!A1", value=1)', empty)
    assert script.steps[0].unknown
