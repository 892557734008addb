"""Workbook model, script execution, formula evaluation, and comparison."""

from .compare import DiffReport, Mismatch, compare
from .executor import execute
from .formula import evaluate_formula, parse_formula, read_cell, shift_formula
from .io import load_workbook, save_workbook
from .model import (
    CHART_TYPES,
    ChartMeta,
    ErrorValue,
    FilterMeta,
    FormatMeta,
    FormulaCell,
    PivotMeta,
    Sheet,
    Workbook,
)

__all__ = [
    "CHART_TYPES",
    "ChartMeta",
    "DiffReport",
    "ErrorValue",
    "FilterMeta",
    "FormatMeta",
    "FormulaCell",
    "Mismatch",
    "PivotMeta",
    "Sheet",
    "Workbook",
    "compare",
    "evaluate_formula",
    "execute",
    "load_workbook",
    "parse_formula",
    "read_cell",
    "save_workbook",
    "shift_formula",
]
