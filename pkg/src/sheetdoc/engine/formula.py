"""Formula parsing and evaluation.

Supported: numeric and string literals, cell references (local and
Sheet!A1 cross-sheet), ranges as function arguments, + - * / ^ with
standard precedence and parentheses, and SUM / AVERAGE / MIN / MAX /
COUNT. Evaluation never raises; failures come back as ErrorValue cells
(#REF for missing targets, #CYCLE for reference cycles, #VALUE for type
mismatches and anything else).

Absolute markers ('$') are accepted and treated as relative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..xwapi.refs import column_index, column_letters
from .model import ERR_CYCLE, ERR_REF, ERR_VALUE, ErrorValue, FormulaCell, Workbook

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<err>\#[A-Z]+!?)
  | (?P<sheet>'(?:[^']+)'!|[A-Za-z_][A-Za-z0-9_]*!)
  | (?P<cell>\$?[A-Za-z]{1,3}\$?[0-9]+)
  | (?P<number>[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>[-+*/^(),:])
    """,
    re.VERBOSE,
)

FUNCTIONS = ("SUM", "AVERAGE", "MIN", "MAX", "COUNT")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str


class _FormulaParseError(Exception):
    pass


def tokenize(source: str) -> list[_Tok]:
    """Tokenize the body of a formula (without the leading '=')."""
    tokens: list[_Tok] = []
    pos = 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if not match:
            raise _FormulaParseError(f"unexpected character {source[pos]!r}")
        pos = match.end()
        kind = match.lastgroup
        if kind == "ws":
            continue
        tokens.append(_Tok(kind, match.group(0)))
    return tokens


def _cell_coords(text: str) -> tuple[int, int]:
    body = text.replace("$", "")
    split = 0
    while split < len(body) and body[split].isalpha():
        split += 1
    return column_index(body[:split]), int(body[split:])


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class _Num:
    value: float


@dataclass(frozen=True)
class _Str:
    value: str


@dataclass(frozen=True)
class _Err:
    code: str


@dataclass(frozen=True)
class _Ref:
    sheet: str | None
    column: int
    row: int


@dataclass(frozen=True)
class _Range:
    sheet: str | None
    start: tuple[int, int]
    end: tuple[int, int]


@dataclass(frozen=True)
class _Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class _Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class _Call:
    name: str
    args: tuple[object, ...]


class _Parser:
    def __init__(self, tokens: list[_Tok]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Tok | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise _FormulaParseError("unexpected end of formula")
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> None:
        tok = self.take()
        if tok.kind != "op" or tok.text != text:
            raise _FormulaParseError(f"expected {text!r}, got {tok.text!r}")

    def at_op(self, *texts: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in texts

    def parse(self):
        node = self.expr()
        if self.peek() is not None:
            raise _FormulaParseError(f"unexpected token {self.peek().text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take().text
            node = _Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take().text
            node = _Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.at_op("-", "+"):
            op = self.take().text
            return _Unary(op, self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.at_op("^"):
            self.take()
            node = _Binary("^", node, self.unary())
        return node

    def ref_or_range(self, sheet: str | None, first: str):
        start = _cell_coords(first)
        if self.at_op(":"):
            self.take()
            tok = self.take()
            if tok.kind != "cell":
                raise _FormulaParseError("expected a cell after ':'")
            end = _cell_coords(tok.text)
            lo = (min(start[0], end[0]), min(start[1], end[1]))
            hi = (max(start[0], end[0]), max(start[1], end[1]))
            return _Range(sheet, lo, hi)
        return _Ref(sheet, start[0], start[1])

    def atom(self):
        tok = self.take()
        if tok.kind == "number":
            return _Num(float(tok.text))
        if tok.kind == "string":
            body = tok.text[1:-1]
            return _Str(body.replace('\\"', '"').replace("\\\\", "\\"))
        if tok.kind == "err":
            return _Err(tok.text.rstrip("!"))
        if tok.kind == "sheet":
            sheet = tok.text[:-1]
            if sheet.startswith("'"):
                sheet = sheet[1:-1]
            cell = self.take()
            if cell.kind != "cell":
                raise _FormulaParseError("expected a cell after sheet name")
            return self.ref_or_range(sheet, cell.text)
        if tok.kind == "cell":
            return self.ref_or_range(None, tok.text)
        if tok.kind == "name":
            self.expect_op("(")
            args = []
            if not self.at_op(")"):
                args.append(self.expr())
                while self.at_op(","):
                    self.take()
                    args.append(self.expr())
            self.expect_op(")")
            return _Call(tok.text.upper(), tuple(args))
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise _FormulaParseError(f"unexpected token {tok.text!r}")


def parse_formula(source: str):
    if not source.startswith("="):
        raise ValueError(f"formula must start with '=', got {source!r}")
    return _Parser(tokenize(source[1:])).parse()


# ---------------------------------------------------------------- evaluation


def _as_number(value):
    if value is None:
        return 0.0
    if isinstance(value, ErrorValue):
        return value
    if isinstance(value, bool) or isinstance(value, str):
        return ErrorValue(ERR_VALUE, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    return ErrorValue(ERR_VALUE, f"expected a number, got {value!r}")


class _Evaluator:
    def __init__(self, book: Workbook, sheet: str, stack: set[tuple[str, int, int]]):
        self.book = book
        self.sheet = sheet
        self.stack = stack

    def cell_value(self, sheet_name: str, column: int, row: int):
        sheet = self.book.sheet(sheet_name)
        if sheet is None:
            return ErrorValue(ERR_REF, f"missing sheet {sheet_name!r}")
        return read_cell(self.book, sheet.name, column, row, self.stack)

    def eval(self, node):
        if isinstance(node, _Num):
            return node.value
        if isinstance(node, _Str):
            return node.value
        if isinstance(node, _Err):
            return ErrorValue(node.code)
        if isinstance(node, _Ref):
            return self.cell_value(node.sheet or self.sheet, node.column, node.row)
        if isinstance(node, _Range):
            return ErrorValue(ERR_VALUE, "a range is only valid as a function argument")
        if isinstance(node, _Unary):
            operand = _as_number(self.eval(node.operand))
            if isinstance(operand, ErrorValue):
                return operand
            return -operand if node.op == "-" else operand
        if isinstance(node, _Binary):
            left = _as_number(self.eval(node.left))
            if isinstance(left, ErrorValue):
                return left
            right = _as_number(self.eval(node.right))
            if isinstance(right, ErrorValue):
                return right
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                if right == 0:
                    return ErrorValue(ERR_VALUE, "division by zero")
                return left / right
            try:
                return float(left) ** float(right)
            except (OverflowError, ValueError):
                return ErrorValue(ERR_VALUE, "power out of range")
        if isinstance(node, _Call):
            return self.call(node)
        return ErrorValue(ERR_VALUE, f"unsupported formula node {node!r}")

    def _numeric_args(self, node: _Call):
        """Flatten arguments to numeric values; range cells that are not
        numbers are skipped, scalar arguments must be numbers."""
        out: list[float] = []
        for arg in node.args:
            if isinstance(arg, _Range):
                sheet_name = arg.sheet or self.sheet
                if self.book.sheet(sheet_name) is None:
                    return ErrorValue(ERR_REF, f"missing sheet {sheet_name!r}")
                for col in range(arg.start[0], arg.end[0] + 1):
                    for row in range(arg.start[1], arg.end[1] + 1):
                        value = self.cell_value(sheet_name, col, row)
                        if isinstance(value, ErrorValue):
                            return value
                        if isinstance(value, bool) or not isinstance(value, (int, float)):
                            continue
                        out.append(float(value))
            else:
                value = _as_number(self.eval(arg))
                if isinstance(value, ErrorValue):
                    return value
                out.append(value)
        return out

    def call(self, node: _Call):
        if node.name not in FUNCTIONS:
            return ErrorValue(ERR_VALUE, f"unknown function {node.name}")
        values = self._numeric_args(node)
        if isinstance(values, ErrorValue):
            return values
        if node.name == "SUM":
            return float(sum(values))
        if node.name == "COUNT":
            return float(len(values))
        if node.name == "AVERAGE":
            if not values:
                return ErrorValue(ERR_VALUE, "AVERAGE of no numeric values")
            return sum(values) / len(values)
        if not values:
            return 0.0
        return float(min(values) if node.name == "MIN" else max(values))


def read_cell(book: Workbook, sheet_name: str, column: int, row: int,
              stack: set[tuple[str, int, int]] | None = None):
    """Current value of a cell; formula cells evaluate through their cache."""
    sheet = book.sheet(sheet_name)
    if sheet is None:
        return ErrorValue(ERR_REF, f"missing sheet {sheet_name!r}")
    raw = sheet.cells.get((column, row))
    if not isinstance(raw, FormulaCell):
        return raw
    if raw.cached_version == book.version:
        return raw.cached
    key = (sheet.name.lower(), column, row)
    stack = stack if stack is not None else set()
    if key in stack:
        return ErrorValue(ERR_CYCLE, "circular reference")
    stack.add(key)
    try:
        value = evaluate_formula(book, sheet.name, raw.source, stack)
    finally:
        stack.discard(key)
    if not isinstance(value, ErrorValue) or value.code != ERR_CYCLE:
        raw.cached = value
        raw.cached_version = book.version
    return value


def evaluate_formula(book: Workbook, sheet: str, source: str,
                     _stack: set[tuple[str, int, int]] | None = None):
    """Evaluate a formula in the context of a sheet. Returns the value or
    an ErrorValue; the source must begin with '='."""
    try:
        node = parse_formula(source)
    except _FormulaParseError as exc:
        return ErrorValue(ERR_VALUE, str(exc))
    return _Evaluator(book, sheet, _stack if _stack is not None else set()).eval(node)


# ------------------------------------------------------- reference shifting


def shift_formula(source: str, rows: int, columns: int) -> str:
    """Shift every cell reference in a formula by (rows, columns).

    References pushed off the sheet become #REF. '$' markers are dropped
    (treated as relative).
    """
    body = source[1:] if source.startswith("=") else source
    try:
        tokens = tokenize(body)
    except _FormulaParseError:
        return source
    out: list[str] = []
    for tok in tokens:
        if tok.kind == "cell":
            col, row = _cell_coords(tok.text)
            col += columns
            row += rows
            if col < 1 or row < 1:
                out.append(ERR_REF)
            else:
                out.append(f"{column_letters(col)}{row}")
        else:
            out.append(tok.text)
    return "=" + "".join(out)
