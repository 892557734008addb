"""Apply action scripts to a workbook."""

from __future__ import annotations

import logging

from ..errors import ExecError
from ..xwapi.actions import ActionScript, AtomicAction, Formula
from ..xwapi.refs import RangeRef
from .formula import shift_formula
from .model import (
    CHART_TYPES,
    ChartMeta,
    FilterMeta,
    FormatMeta,
    FormulaCell,
    PivotMeta,
    Sheet,
    Workbook,
)

logger = logging.getLogger(__name__)


def _need_range(action: AtomicAction, key: str, index: int) -> RangeRef:
    value = action.get(key)
    if not isinstance(value, RangeRef):
        raise ExecError(index, f"{action.name}: argument {key} must be a range")
    return value


def _need_str(action: AtomicAction, key: str, index: int) -> str:
    value = action.get(key)
    if not isinstance(value, str):
        raise ExecError(index, f"{action.name}: argument {key} must be a string")
    return value


def _resolve_sheet(book: Workbook, ref: RangeRef, index: int) -> Sheet:
    if ref.sheet is None:
        if not book.sheets:
            raise ExecError(index, "workbook has no sheets")
        return book.sheets[0]
    sheet = book.sheet(ref.sheet)
    if sheet is None:
        raise ExecError(index, f"missing sheet {ref.sheet!r}")
    return sheet


def _copy_cell(book: Workbook, src_sheet: Sheet, src: tuple[int, int],
               dst_sheet: Sheet, dst: tuple[int, int]) -> None:
    raw = src_sheet.cells.get(src)
    if raw is None:
        dst_sheet.cells.pop(dst, None)
    elif isinstance(raw, FormulaCell):
        shifted = shift_formula(raw.source, dst[1] - src[1], dst[0] - src[0])
        dst_sheet.cells[dst] = FormulaCell(shifted)
    else:
        dst_sheet.cells[dst] = raw
    book.touch()


def _exec_write(book: Workbook, action: AtomicAction, index: int) -> None:
    target = _need_range(action, "range", index)
    sheet = _resolve_sheet(book, target, index)
    value = action.get("value")
    if isinstance(value, Formula):
        value = FormulaCell(value.source)
    elif isinstance(value, (RangeRef,)):
        value = value.a1()
    for col, row in target.cells():
        book.set_cell(sheet.name, col, row, value)


def _exec_copy_paste(book: Workbook, action: AtomicAction, index: int) -> None:
    source = _need_range(action, "source", index)
    dest = _need_range(action, "destination", index)
    src_sheet = _resolve_sheet(book, source, index)
    dst_sheet = _resolve_sheet(book, dest, index)
    # Paste anchors at the destination's top-left corner with the source shape.
    src_cells = [(col, row) for col, row in source.cells()]
    for col, row in src_cells:
        offset_col = col - source.start.column
        offset_row = row - source.start.row
        _copy_cell(
            book, src_sheet, (col, row), dst_sheet,
            (dest.start.column + offset_col, dest.start.row + offset_row),
        )


def _exec_create_sheet(book: Workbook, action: AtomicAction, index: int) -> None:
    name = _need_str(action, "sheetName", index)
    if book.sheet(name) is not None:
        raise ExecError(index, f"sheet {name!r} already exists")
    book.add_sheet(Sheet(name))


def _exec_auto_fill(book: Workbook, action: AtomicAction, index: int) -> None:
    source = _need_range(action, "source", index)
    dest = _need_range(action, "destination", index)
    sheet = _resolve_sheet(book, source, index)
    dst_sheet = _resolve_sheet(book, dest, index)
    if sheet is not dst_sheet or not dest.contains(source):
        raise ExecError(index, "AutoFill destination must contain its source range")
    width, height = source.width, source.height
    for col, row in dest.cells():
        src_col = source.start.column + (col - dest.start.column) % width
        src_row = source.start.row + (row - dest.start.row) % height
        if (src_col, src_row) == (col, row):
            continue
        _copy_cell(book, sheet, (src_col, src_row), sheet, (col, row))


def _exec_create_chart(book: Workbook, action: AtomicAction, index: int) -> None:
    source = _need_range(action, "source", index)
    _resolve_sheet(book, source, index)
    dest_name = _need_str(action, "destSheet", index)
    dest = book.sheet(dest_name)
    if dest is None:
        raise ExecError(index, f"missing sheet {dest_name!r}")
    chart_type = _need_str(action, "chartType", index)
    name = _need_str(action, "chartName", index)
    if book.chart(name) is not None:
        raise ExecError(index, f"chart {name!r} already exists")
    if chart_type not in CHART_TYPES:
        logger.warning("chart %r has unrecognized type %r; stored verbatim", name, chart_type)
    dest.charts.append(ChartMeta(name, chart_type, source, dest.name))
    book.touch()


def _exec_set_chart_legend(book: Workbook, action: AtomicAction, index: int) -> None:
    name = _need_str(action, "chartName", index)
    position = _need_str(action, "position", index)
    found = book.chart(name)
    if found is None:
        raise ExecError(index, f"no chart named {name!r}")
    sheet, chart = found
    sheet.charts[sheet.charts.index(chart)] = ChartMeta(
        chart.name, chart.chart_type, chart.source, chart.dest_sheet, position)
    book.touch()


def _exec_filter(book: Workbook, action: AtomicAction, index: int) -> None:
    source = _need_range(action, "source", index)
    sheet = _resolve_sheet(book, source, index)
    field_index = action.get("fieldIndex")
    if isinstance(field_index, float) and field_index.is_integer():
        field_index = int(field_index)
    if not isinstance(field_index, int):
        raise ExecError(index, "Filter: fieldIndex must be an integer")
    if not 1 <= field_index <= source.width:
        raise ExecError(
            index, f"Filter: fieldIndex {field_index} outside range width {source.width}")
    criteria = _need_str(action, "criteria", index)
    sheet.filters.append(FilterMeta(source, field_index, criteria))
    book.touch()


def _split_fields(action: AtomicAction, key: str) -> tuple[str, ...]:
    value = action.get(key, "")
    if not isinstance(value, str):
        value = str(value)
    return tuple(part.strip() for part in value.split(",") if part.strip())


def _exec_create_pivot(book: Workbook, action: AtomicAction, index: int) -> None:
    source = _need_range(action, "source", index)
    _resolve_sheet(book, source, index)
    dest_name = _need_str(action, "destSheet", index)
    dest = book.sheet(dest_name)
    if dest is None:
        raise ExecError(index, f"missing sheet {dest_name!r}")
    name = _need_str(action, "name", index)
    rows = _split_fields(action, "rows")
    columns = _split_fields(action, "columns")
    values = _split_fields(action, "values")
    if not (rows or columns or values):
        raise ExecError(index, "CreatePivotTable: rows, columns, and values are all empty")
    dest.pivots.append(PivotMeta(name, source, dest.name, rows, columns, values))
    book.touch()


def _exec_set_format(book: Workbook, action: AtomicAction, index: int) -> None:
    target = _need_range(action, "range", index)
    sheet = _resolve_sheet(book, target, index)
    prop = _need_str(action, "property", index)
    value = action.get("value")
    if isinstance(value, Formula):
        value = value.source
    if not isinstance(value, (str, int, float)):
        raise ExecError(index, "SetFormat: value must be a string or a number")
    sheet.formats.append(FormatMeta(target, prop, value))
    book.touch()


def _exec_freeze_panes(book: Workbook, action: AtomicAction, index: int) -> None:
    target = _need_range(action, "range", index)
    sheet = _resolve_sheet(book, target, index)
    # Freeze everything above and left of the range's top-left cell.
    sheet.frozen = (target.start.row - 1, target.start.column - 1)
    book.touch()


_HANDLERS = {
    "Write": _exec_write,
    "CopyPaste": _exec_copy_paste,
    "CreateSheet": _exec_create_sheet,
    "AutoFill": _exec_auto_fill,
    "CreateChart": _exec_create_chart,
    "SetChartLegend": _exec_set_chart_legend,
    "Filter": _exec_filter,
    "CreatePivotTable": _exec_create_pivot,
    "SetFormat": _exec_set_format,
    "FreezePanes": _exec_freeze_panes,
}


def execute(script: ActionScript, book: Workbook) -> Workbook:
    """Apply every action to the workbook in order and return it.

    The workbook is mutated in place. Actions flagged unknown are skipped
    with a warning; catalog actions without execution semantics raise
    ExecError, as do missing sheets, AutoFill destinations that do not
    contain their source, and out-of-range filter fields.
    """
    for index, action in enumerate(script.steps):
        if action.unknown:
            logger.warning("step %d: skipping unknown action %s", index, action.name)
            continue
        handler = _HANDLERS.get(action.name)
        if handler is None:
            raise ExecError(index, f"no execution semantics for action {action.name}")
        handler(book, action, index)
    return book
