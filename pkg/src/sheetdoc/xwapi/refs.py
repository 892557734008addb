"""Cell and range references in A1 notation.

Columns and rows are 1-based. Sheet names compare case-insensitively and
render single-quoted when they contain spaces ('Weekly Data'!A1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError

_A1_CELL = re.compile(r"([A-Za-z]{1,3})([1-9][0-9]*)$")
_SHEET_PREFIX = re.compile(r"^(?:'([^']+)'|([^'!:]+))!")


def column_index(letters: str) -> int:
    """Convert column letters to a 1-based index (A=1, Z=26, AA=27)."""
    index = 0
    for ch in letters.upper():
        index = index * 26 + (ord(ch) - ord("A") + 1)
    return index


def column_letters(index: int) -> str:
    """Convert a 1-based column index back to letters."""
    if index < 1:
        raise ValueError(f"column index must be >= 1, got {index}")
    letters = ""
    while index:
        index, rem = divmod(index - 1, 26)
        letters = chr(ord("A") + rem) + letters
    return letters


def _render_sheet(sheet: str) -> str:
    return f"'{sheet}'" if " " in sheet else sheet


@dataclass(frozen=True)
class CellRef:
    """A single cell, optionally qualified with a sheet name."""

    column: int
    row: int
    sheet: str | None = None

    def __post_init__(self) -> None:
        if self.column < 1 or self.row < 1:
            raise ValueError(f"cell coordinates must be >= 1, got {self!r}")

    def a1(self) -> str:
        cell = f"{column_letters(self.column)}{self.row}"
        if self.sheet is None:
            return cell
        return f"{_render_sheet(self.sheet)}!{cell}"

    def offset(self, rows: int, columns: int) -> CellRef:
        return CellRef(self.column + columns, self.row + rows, self.sheet)


@dataclass(frozen=True)
class RangeRef:
    """An inclusive rectangular range; a single cell is a degenerate range.

    start/end are stored sheetless and normalized so that
    start.column <= end.column and start.row <= end.row; the optional sheet
    applies to both ends.
    """

    start: CellRef
    end: CellRef
    sheet: str | None = None

    def __post_init__(self) -> None:
        start, end = self.start, self.end
        lo = CellRef(min(start.column, end.column), min(start.row, end.row))
        hi = CellRef(max(start.column, end.column), max(start.row, end.row))
        object.__setattr__(self, "start", lo)
        object.__setattr__(self, "end", hi)

    @classmethod
    def cell(cls, column: int, row: int, sheet: str | None = None) -> RangeRef:
        ref = CellRef(column, row)
        return cls(ref, ref, sheet)

    @property
    def width(self) -> int:
        return self.end.column - self.start.column + 1

    @property
    def height(self) -> int:
        return self.end.row - self.start.row + 1

    def is_cell(self) -> bool:
        return self.start == self.end

    def contains(self, other: RangeRef) -> bool:
        return (
            self.start.column <= other.start.column
            and self.start.row <= other.start.row
            and self.end.column >= other.end.column
            and self.end.row >= other.end.row
        )

    def cells(self):
        """Yield (column, row) pairs in column-major order."""
        for col in range(self.start.column, self.end.column + 1):
            for row in range(self.start.row, self.end.row + 1):
                yield col, row

    def a1(self) -> str:
        body = self.start.a1()
        if not self.is_cell():
            body = f"{self.start.a1()}:{self.end.a1()}"
        if self.sheet is None:
            return body
        return f"{_render_sheet(self.sheet)}!{body}"


def _parse_cell_body(text: str) -> CellRef:
    match = _A1_CELL.match(text)
    if not match:
        raise ParseError(f"malformed cell reference {text!r}")
    return CellRef(column_index(match.group(1)), int(match.group(2)))


def parse_range(text: str) -> RangeRef:
    """Parse A1 notation like "Sheet1!A1:E71", "Sheet2!A1", or "B7".

    The range is normalized: "Sheet1!E71:A1" parses equal to "Sheet1!A1:E71".
    Raises ParseError on malformed input.
    """
    if not text:
        raise ParseError("empty range reference")
    sheet = None
    body = text
    match = _SHEET_PREFIX.match(text)
    if match:
        sheet = match.group(1) or match.group(2)
        body = text[match.end():]
    if ":" in body:
        first, _, second = body.partition(":")
        return RangeRef(_parse_cell_body(first), _parse_cell_body(second), sheet)
    cell = _parse_cell_body(body)
    return RangeRef(cell, cell, sheet)
