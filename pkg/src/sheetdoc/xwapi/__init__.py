"""The atomic spreadsheet-action language: types, catalog, parser, validation."""

from .actions import ActionArg, ActionScript, AtomicAction, Formula
from .catalog import ActionCatalog, ArgSpec, CatalogEntry, seed_catalog
from .parser import parse_script
from .refs import CellRef, RangeRef, column_index, column_letters, parse_range
from .serializer import serialize_action, serialize_script
from .validate import Diagnostic, has_errors, validate_script

__all__ = [
    "ActionArg",
    "ActionCatalog",
    "ActionScript",
    "ArgSpec",
    "AtomicAction",
    "CatalogEntry",
    "CellRef",
    "Diagnostic",
    "Formula",
    "RangeRef",
    "column_index",
    "column_letters",
    "has_errors",
    "parse_range",
    "parse_script",
    "seed_catalog",
    "serialize_action",
    "serialize_script",
    "validate_script",
]
