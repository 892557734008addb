"""Translate recorded macro code into action scripts.

Covers straight-line recorder output in two dialects: a VBA subset and a
Google Apps Script / JS subset. Each manipulation statement maps to exactly
one atomic action; declarations and sheet selection statements bind the
active sheet (default "Sheet1") and emit an info diagnostic; anything else
degrades to an `Unknown` action carrying the raw line plus a warning.

Only unbalanced string literals or parentheses are fatal.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import ParseError
from .xwapi.actions import ActionArg, ActionScript, AtomicAction, Formula
from .xwapi.catalog import ActionCatalog
from .xwapi.refs import RangeRef, parse_range
from .xwapi.validate import INFO, WARNING, Diagnostic

DEFAULT_SHEET = "Sheet1"


class SourceDialect(enum.Enum):
    VBA = "vba"
    GAS = "gas"


# ------------------------------------------------------------------ VBA

_VBA_STR = r'"(?:[^"]|"")*"'
_VBA_QUAL = rf"(?:(?:Worksheets|Sheets)\(\s*({_VBA_STR})\s*\)\.)?"
_VBA_NUM = r"-?\d+(?:\.\d+)?"

_VBA_WRITE = re.compile(
    rf"^{_VBA_QUAL}Range\(\s*({_VBA_STR})\s*\)\.(Value|Formula)\s*=\s*({_VBA_STR}|{_VBA_NUM})$",
    re.IGNORECASE,
)
_VBA_COPY = re.compile(
    rf"^{_VBA_QUAL}Range\(\s*({_VBA_STR})\s*\)\.Copy\s+Destination:=\s*"
    rf"{_VBA_QUAL}Range\(\s*({_VBA_STR})\s*\)$",
    re.IGNORECASE,
)
_VBA_AUTOFILL = re.compile(
    rf"^{_VBA_QUAL}Range\(\s*({_VBA_STR})\s*\)\.AutoFill\s+Destination:=\s*"
    rf"{_VBA_QUAL}Range\(\s*({_VBA_STR})\s*\)(?:\s*,\s*Type:=\w+)?$",
    re.IGNORECASE,
)
_VBA_ADD_SHEET = re.compile(
    rf"^(?:Worksheets|Sheets)\.Add\.Name\s*=\s*({_VBA_STR})$", re.IGNORECASE)
_VBA_SELECT = re.compile(
    rf"^(?:Worksheets|Sheets)\(\s*({_VBA_STR})\s*\)\.(?:Select|Activate)$", re.IGNORECASE)
_VBA_DECL = re.compile(r"^(?:Dim|Set)\b", re.IGNORECASE)
_VBA_SELECTOR_ANYWHERE = re.compile(
    rf"(?:Worksheets|Sheets)\(\s*({_VBA_STR})\s*\)", re.IGNORECASE)


def _vba_unquote(text: str) -> str:
    return text[1:-1].replace('""', '"')


def _vba_strip_comment(line: str) -> str:
    in_string = False
    for pos, ch in enumerate(line):
        if ch == '"':
            in_string = not in_string
        elif ch == "'" and not in_string:
            return line[:pos]
    return line


# ------------------------------------------------------------------ GAS

_JS_STR = r"""(?:"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')"""
_JS_NUM = r"-?\d+(?:\.\d+)?"

_GAS_WRITE = re.compile(
    rf"^(?P<head>.*?)\.getRange\(\s*(?P<range>{_JS_STR})\s*\)"
    rf"\.(?P<method>setValue|setFormula)\(\s*(?P<value>{_JS_STR}|{_JS_NUM})\s*\)\s*;?$")
_GAS_COPY = re.compile(
    rf"^(?P<head>.*?)\.getRange\(\s*(?P<range>{_JS_STR})\s*\)"
    rf"\.copyTo\(\s*(?P<dest_head>.*?)\.getRange\(\s*(?P<dest>{_JS_STR})\s*\)\s*\)\s*;?$")
_GAS_AUTOFILL = re.compile(
    rf"^(?P<head>.*?)\.getRange\(\s*(?P<range>{_JS_STR})\s*\)"
    rf"\.autoFill\(\s*(?P<dest_head>.*?)\.getRange\(\s*(?P<dest>{_JS_STR})\s*\)"
    rf"\s*(?:,[^)]*)?\)\s*;?$")
_GAS_INSERT_SHEET = re.compile(
    rf"\.insertSheet\(\s*({_JS_STR})\s*\)")
_GAS_ACTIVATE = re.compile(
    rf"^.*?\.getSheetByName\(\s*({_JS_STR})\s*\)\.activate\(\)\s*;?$")
_GAS_DECL = re.compile(r"^(?:var|let|const)\s+\w+\s*=")
_GAS_SHEET_ANYWHERE = re.compile(rf"\.getSheetByName\(\s*({_JS_STR})\s*\)")


def _js_unquote(text: str) -> str:
    body = text[1:-1]
    quote = text[0]
    return body.replace("\\" + quote, quote).replace("\\\\", "\\")


def _js_strip_comment(line: str) -> str:
    in_string: str | None = None
    escaped = False
    for pos, ch in enumerate(line):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == in_string:
                in_string = None
        elif ch in "\"'":
            in_string = ch
        elif ch == "/" and line[pos:pos + 2] == "//":
            return line[:pos]
    return line


# ------------------------------------------------------------- shared bits


def _check_balance(line: str, line_no: int, dialect: SourceDialect) -> None:
    in_string: str | None = None
    escaped = False
    depth = 0
    quotes = '"' if dialect is SourceDialect.VBA else "\"'"
    pos = 0
    while pos < len(line):
        ch = line[pos]
        if in_string:
            if dialect is SourceDialect.VBA:
                if ch == '"':
                    if line[pos + 1:pos + 2] == '"':
                        pos += 1
                    else:
                        in_string = None
            elif escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == in_string:
                in_string = None
        elif ch in quotes:
            in_string = ch
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses", line_no, pos + 1)
        pos += 1
    if in_string:
        raise ParseError("unterminated string literal", line_no, len(line))
    if depth != 0:
        raise ParseError("unbalanced parentheses", line_no, len(line))


def _qualify(range_text: str, sheet: str) -> RangeRef:
    ref = parse_range(range_text)
    if ref.sheet is None:
        ref = RangeRef(ref.start, ref.end, sheet)
    return ref


def _write_action(range_text: str, sheet: str, value) -> AtomicAction:
    return AtomicAction("Write", (
        ActionArg("range", _qualify(range_text, sheet)),
        ActionArg("value", value),
    ))


def _pair_action(name: str, source_text: str, source_sheet: str,
                 dest_text: str, dest_sheet: str) -> AtomicAction:
    return AtomicAction(name, (
        ActionArg("source", _qualify(source_text, source_sheet)),
        ActionArg("destination", _qualify(dest_text, dest_sheet)),
    ))


def _literal(token: str, unquote) -> object:
    if token[0] in "\"'":
        text = unquote(token)
        return Formula(text) if text.startswith("=") else text
    return float(token) if "." in token else int(token)


@dataclass
class _Context:
    sheet: str = DEFAULT_SHEET


class _Statement:
    __slots__ = ("action", "binding")

    def __init__(self, action: AtomicAction | None = None, binding: str | None = None):
        self.action = action
        self.binding = binding


def _vba_statement(line: str, ctx: _Context) -> _Statement | None:
    match = _VBA_WRITE.match(line)
    if match:
        qual, range_text, method, value_tok = match.groups()
        sheet = _vba_unquote(qual) if qual else ctx.sheet
        value = _literal(value_tok, _vba_unquote)
        if method.lower() == "formula" and isinstance(value, str) and value.startswith("="):
            value = Formula(value)
        if qual:
            ctx.sheet = sheet
        return _Statement(_write_action(_vba_unquote(range_text), sheet, value))
    match = _VBA_COPY.match(line)
    if match:
        src_qual, src, dst_qual, dst = match.groups()
        src_sheet = _vba_unquote(src_qual) if src_qual else ctx.sheet
        dst_sheet = _vba_unquote(dst_qual) if dst_qual else src_sheet
        if src_qual:
            ctx.sheet = src_sheet
        return _Statement(_pair_action(
            "CopyPaste", _vba_unquote(src), src_sheet, _vba_unquote(dst), dst_sheet))
    match = _VBA_AUTOFILL.match(line)
    if match:
        src_qual, src, dst_qual, dst = match.groups()
        src_sheet = _vba_unquote(src_qual) if src_qual else ctx.sheet
        dst_sheet = _vba_unquote(dst_qual) if dst_qual else src_sheet
        if src_qual:
            ctx.sheet = src_sheet
        return _Statement(_pair_action(
            "AutoFill", _vba_unquote(src), src_sheet, _vba_unquote(dst), dst_sheet))
    match = _VBA_ADD_SHEET.match(line)
    if match:
        name = _vba_unquote(match.group(1))
        return _Statement(AtomicAction("CreateSheet", (ActionArg("sheetName", name),)))
    match = _VBA_SELECT.match(line)
    if match:
        ctx.sheet = _vba_unquote(match.group(1))
        return _Statement(binding=ctx.sheet)
    if _VBA_DECL.match(line):
        selector = _VBA_SELECTOR_ANYWHERE.search(line)
        if selector:
            ctx.sheet = _vba_unquote(selector.group(1))
        return _Statement(binding=ctx.sheet)
    return None


def _gas_head_sheet(head: str, ctx: _Context) -> str:
    selector = None
    for selector in _GAS_SHEET_ANYWHERE.finditer(head):
        pass
    if selector:
        ctx.sheet = _js_unquote(selector.group(1))
    return ctx.sheet


def _gas_statement(line: str, ctx: _Context) -> _Statement | None:
    match = _GAS_WRITE.match(line)
    if match:
        sheet = _gas_head_sheet(match.group("head"), ctx)
        value = _literal(match.group("value"), _js_unquote)
        if match.group("method") == "setFormula" and isinstance(value, str) \
                and value.startswith("="):
            value = Formula(value)
        return _Statement(_write_action(_js_unquote(match.group("range")), sheet, value))
    match = _GAS_COPY.match(line)
    if match:
        src_sheet = _gas_head_sheet(match.group("head"), ctx)
        dest_selector = _GAS_SHEET_ANYWHERE.search(match.group("dest_head"))
        dst_sheet = _js_unquote(dest_selector.group(1)) if dest_selector else src_sheet
        return _Statement(_pair_action(
            "CopyPaste", _js_unquote(match.group("range")), src_sheet,
            _js_unquote(match.group("dest")), dst_sheet))
    match = _GAS_AUTOFILL.match(line)
    if match:
        src_sheet = _gas_head_sheet(match.group("head"), ctx)
        dest_selector = _GAS_SHEET_ANYWHERE.search(match.group("dest_head"))
        dst_sheet = _js_unquote(dest_selector.group(1)) if dest_selector else src_sheet
        return _Statement(_pair_action(
            "AutoFill", _js_unquote(match.group("range")), src_sheet,
            _js_unquote(match.group("dest")), dst_sheet))
    match = _GAS_INSERT_SHEET.search(line)
    if match:
        name = _js_unquote(match.group(1))
        return _Statement(AtomicAction("CreateSheet", (ActionArg("sheetName", name),)))
    match = _GAS_ACTIVATE.match(line)
    if match:
        ctx.sheet = _js_unquote(match.group(1))
        return _Statement(binding=ctx.sheet)
    if _GAS_DECL.match(line):
        selector = _GAS_SHEET_ANYWHERE.search(line)
        if selector:
            ctx.sheet = _js_unquote(selector.group(1))
        return _Statement(binding=ctx.sheet)
    return None


def _is_comment(line: str, dialect: SourceDialect) -> bool:
    if dialect is SourceDialect.VBA:
        return line.startswith("'") or re.match(r"^Rem\b", line, re.IGNORECASE) is not None
    return line.startswith("//") or line.startswith("/*") or line.startswith("*") \
        or line.startswith("*/")


def transpile(source: str, dialect: SourceDialect,
              catalog: ActionCatalog) -> tuple[ActionScript, list[Diagnostic]]:
    """Translate macro source into an ActionScript plus diagnostics.

    Every inserted action becomes its own step group, in statement order.
    Raises ParseError only for unbalanced strings or parentheses; statement
    level failures surface as `Unknown` actions with warning diagnostics.
    Binding statements (declarations, sheet selection) emit info diagnostics
    with step -1 and produce no action.
    """
    ctx = _Context()
    recognize = _vba_statement if dialect is SourceDialect.VBA else _gas_statement
    strip_comment = _vba_strip_comment if dialect is SourceDialect.VBA else _js_strip_comment
    actions: list[AtomicAction] = []
    diagnostics: list[Diagnostic] = []
    for line_no, raw in enumerate(source.splitlines(), 1):
        line = raw.strip()
        if not line or _is_comment(line, dialect):
            continue
        line = strip_comment(line).strip()
        if not line:
            continue
        _check_balance(line, line_no, dialect)
        statement = recognize(line, ctx)
        if statement is None:
            actions.append(AtomicAction(
                "Unknown", (ActionArg("raw", line),), unknown=True))
            diagnostics.append(Diagnostic(
                len(actions) - 1, WARNING, f"line {line_no}: unrecognized statement"))
        elif statement.action is not None:
            action = statement.action
            if action.name in catalog:
                canonical = tuple(
                    ActionArg(catalog.canonical_key(action.name, arg.key), arg.value)
                    for arg in action.args)
                action = AtomicAction(action.name, canonical)
            actions.append(action)
        else:
            diagnostics.append(Diagnostic(
                -1, INFO, f"line {line_no}: sheet context bound to {statement.binding!r}"))
    if not actions:
        raise ParseError("no statements produced any action", 1, 1)
    return ActionScript(tuple(actions)), diagnostics


def active_sheet_resolution(source: str, dialect: SourceDialect) -> str:
    """Sheet name in effect after scanning the source (default "Sheet1")."""
    ctx = _Context()
    recognize = _vba_statement if dialect is SourceDialect.VBA else _gas_statement
    strip_comment = _vba_strip_comment if dialect is SourceDialect.VBA else _js_strip_comment
    for line_no, raw in enumerate(source.splitlines(), 1):
        line = raw.strip()
        if not line or _is_comment(line, dialect):
            continue
        line = strip_comment(line).strip()
        if not line:
            continue
        try:
            _check_balance(line, line_no, dialect)
        except ParseError:
            continue
        recognize(line, ctx)
    return ctx.sheet
