"""In-memory workbook model: sheets, cells, chart/pivot/filter/format metadata.

A workbook is single-owner mutable state. Cell contents are stored sparsely;
an absent entry is an empty cell. Formula cells cache their evaluated value
against the workbook's mutation counter and are recomputed lazily.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..xwapi.refs import RangeRef, column_letters

CHART_TYPES = frozenset({"Line", "Bar", "Column", "Pie", "XYScatter", "Area"})

ERR_REF = "#REF"
ERR_CYCLE = "#CYCLE"
ERR_VALUE = "#VALUE"


@dataclass(frozen=True)
class ErrorValue:
    """A formula error value such as #REF, #CYCLE, or #VALUE."""

    code: str
    detail: str = ""

    def __str__(self) -> str:
        return self.code


@dataclass
class FormulaCell:
    """A formula with its lazily recomputed cached value."""

    source: str
    cached: object = None
    cached_version: int = -1

    def __post_init__(self) -> None:
        if not self.source.startswith("="):
            raise ValueError(f"formula source must start with '=', got {self.source!r}")


@dataclass(frozen=True)
class ChartMeta:
    name: str
    chart_type: str
    source: RangeRef
    dest_sheet: str
    legend_position: str | None = None


@dataclass(frozen=True)
class PivotMeta:
    name: str
    source: RangeRef
    dest_sheet: str
    rows: tuple[str, ...] = ()
    columns: tuple[str, ...] = ()
    values: tuple[str, ...] = ()


@dataclass(frozen=True)
class FilterMeta:
    source: RangeRef
    field_index: int
    criteria: str


@dataclass(frozen=True)
class FormatMeta:
    range: RangeRef
    property: str
    value: str | int | float


@dataclass
class Sheet:
    name: str
    cells: dict[tuple[int, int], object] = field(default_factory=dict)
    charts: list[ChartMeta] = field(default_factory=list)
    pivots: list[PivotMeta] = field(default_factory=list)
    filters: list[FilterMeta] = field(default_factory=list)
    formats: list[FormatMeta] = field(default_factory=list)
    frozen: tuple[int, int] | None = None

    def used_range(self) -> tuple[int, int]:
        """(max column, max row) over non-empty cells; (0, 0) when empty."""
        if not self.cells:
            return 0, 0
        cols, rows = zip(*self.cells)
        return max(cols), max(rows)


class Workbook:
    """Ordered sheets with unique (case-insensitive) names."""

    def __init__(self, sheets: list[Sheet] | None = None):
        self.sheets: list[Sheet] = []
        self.version = 0
        for sheet in sheets or []:
            self.add_sheet(sheet)

    @classmethod
    def blank(cls, sheet_name: str = "Sheet1") -> Workbook:
        return cls([Sheet(sheet_name)])

    def sheet(self, name: str) -> Sheet | None:
        lowered = name.lower()
        for sheet in self.sheets:
            if sheet.name.lower() == lowered:
                return sheet
        return None

    def add_sheet(self, sheet: Sheet) -> Sheet:
        if self.sheet(sheet.name) is not None:
            raise ValueError(f"duplicate sheet name {sheet.name!r}")
        self.sheets.append(sheet)
        self.version += 1
        return sheet

    def chart(self, name: str) -> tuple[Sheet, ChartMeta] | None:
        for sheet in self.sheets:
            for chart in sheet.charts:
                if chart.name == name:
                    return sheet, chart
        return None

    def touch(self) -> None:
        """Invalidate all formula caches."""
        self.version += 1

    def set_cell(self, sheet_name: str, column: int, row: int, value) -> None:
        """Store a raw value; strings beginning with '=' become formulas,
        None clears the cell."""
        sheet = self.sheet(sheet_name)
        if sheet is None:
            raise KeyError(sheet_name)
        key = (column, row)
        if value is None:
            sheet.cells.pop(key, None)
        elif isinstance(value, FormulaCell):
            sheet.cells[key] = FormulaCell(value.source)
        elif isinstance(value, str) and value.startswith("="):
            sheet.cells[key] = FormulaCell(value)
        elif isinstance(value, bool):
            sheet.cells[key] = value
        elif isinstance(value, (int, float)):
            sheet.cells[key] = float(value)
        elif isinstance(value, str):
            sheet.cells[key] = value
        else:
            raise TypeError(f"unsupported cell value {value!r}")
        self.touch()

    def raw_cell(self, sheet_name: str, column: int, row: int):
        sheet = self.sheet(sheet_name)
        if sheet is None:
            return None
        return sheet.cells.get((column, row))


def cell_location(sheet_name: str, column: int, row: int) -> str:
    return f"{sheet_name}!{column_letters(column)}{row}"
