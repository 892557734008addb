"""Parser for action script text.

Script syntax, one action per bullet line:

    - - Write(range="Sheet1!D1", value="Profit")
    - - Write(range="Sheet1!D2", value="=B2-C2")
      - Write(range="Sheet1!E2", value="=B2+C2")

"- -" opens a new step group, a plain "-" joins the current group, and
blank lines (or bare "." elision markers) are ignored. A line with an
unterminated string or open parenthesis continues onto the next line; the
line break collapses to a single space.

Unknown action names never abort a parse; they are flagged on the action.
"""

from __future__ import annotations

import re

from ..errors import ParseError
from .actions import ActionArg, ActionScript, AtomicAction, Formula
from .catalog import ActionCatalog
from .refs import parse_range

_GROUP_OPEN = re.compile(r"^(\s*)-\s+-\s+(.*)$")
_GROUP_CONT = re.compile(r"^(\s*)-\s+(.*)$")
_ELISION = re.compile(r"^\s*\.+\s*$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"-?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def _balance(text: str) -> tuple[bool, int]:
    """Return (inside_string, paren_depth) after scanning text."""
    in_string = False
    escaped = False
    depth = 0
    for ch in text:
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
    return in_string, depth


class _Cursor:
    def __init__(self, text: str, line: int, col_offset: int):
        self.text = text
        self.pos = 0
        self.line = line
        self.col_offset = col_offset

    def column(self) -> int:
        return self.col_offset + self.pos + 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.column())

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while not self.eof() and self.text[self.pos] in " \t":
            self.pos += 1

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def match_re(self, pattern: re.Pattern) -> re.Match | None:
        match = pattern.match(self.text, self.pos)
        if match:
            self.pos = match.end()
        return match

    def read_string(self) -> str:
        self.take('"')
        out: list[str] = []
        while True:
            if self.eof():
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == "\\":
                if self.eof():
                    raise self.error("dangling escape")
                esc = self.text[self.pos]
                self.pos += 1
                out.append(_ESCAPES.get(esc, esc))
            elif ch == '"':
                return "".join(out)
            else:
                out.append(ch)


def _coerce(action_name: str, key: str, value, catalog: ActionCatalog):
    entry = catalog.get(action_name)
    if entry is None or not isinstance(value, str):
        return value
    spec = entry.arg_spec(key)
    if spec is None or spec.type not in ("range", "cell"):
        return value
    try:
        ref = parse_range(value)
    except ParseError:
        return value
    if spec.type == "cell":
        if not ref.is_cell():
            return value
        start = ref.start
        return start if ref.sheet is None else type(start)(start.column, start.row, ref.sheet)
    return ref


def _parse_action(body: str, line: int, col_offset: int, catalog: ActionCatalog) -> AtomicAction:
    cur = _Cursor(body, line, col_offset)
    cur.skip_ws()
    name_match = cur.match_re(_NAME)
    if not name_match:
        raise cur.error("expected action name")
    name = name_match.group(0)
    cur.skip_ws()
    cur.take("(")
    args: list[ActionArg] = []
    seen: set[str] = set()
    cur.skip_ws()
    if cur.peek() != ")":
        while True:
            cur.skip_ws()
            key_match = cur.match_re(_NAME)
            if not key_match:
                raise cur.error("expected argument name")
            key = catalog.canonical_key(name, key_match.group(0))
            if key in seen:
                raise cur.error(f"duplicate argument {key!r}")
            seen.add(key)
            cur.skip_ws()
            cur.take("=")
            cur.skip_ws()
            value: object
            if cur.peek() == '"':
                text = cur.read_string()
                value = Formula(text) if text.startswith("=") else text
            else:
                num_match = cur.match_re(_NUMBER)
                if not num_match:
                    raise cur.error("expected a number or a quoted string")
                token = num_match.group(0)
                value = float(token) if any(c in token for c in ".eE") else int(token)
            value = _coerce(name, key, value, catalog)
            args.append(ActionArg(key, value))
            cur.skip_ws()
            if cur.peek() == ",":
                cur.pos += 1
                continue
            break
    cur.take(")")
    cur.skip_ws()
    if not cur.eof():
        raise cur.error(f"unexpected trailing text {cur.text[cur.pos:]!r}")
    return AtomicAction(name, tuple(args), unknown=name not in catalog)


def _logical_lines(text: str):
    """Yield (line_number, content, opens_group) with continuations joined."""
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        start_line = i + 1
        if not raw.strip() or _ELISION.match(raw):
            i += 1
            continue
        opener = _GROUP_OPEN.match(raw)
        cont = None if opener else _GROUP_CONT.match(raw)
        if opener:
            content, offset, opens_group = opener.group(2), opener.start(2), True
        elif cont:
            content, offset, opens_group = cont.group(2), cont.start(2), False
        else:
            content, offset, opens_group = raw.strip(), len(raw) - len(raw.lstrip()), True
        in_string, depth = _balance(content)
        while (in_string or depth > 0) and i + 1 < len(lines):
            i += 1
            content = content.rstrip() + " " + lines[i].strip()
            in_string, depth = _balance(content)
        if in_string:
            raise ParseError("unterminated string", start_line, len(raw) + 1)
        if depth != 0:
            raise ParseError("unbalanced parentheses", start_line, len(raw) + 1)
        yield start_line, content, offset, opens_group
        i += 1


def parse_script(text: str, catalog: ActionCatalog) -> ActionScript:
    """Parse script text into an ActionScript.

    Raises ParseError (with line/column) on malformed action syntax or an
    empty script; unknown action names are flagged, never fatal.
    """
    steps: list[AtomicAction] = []
    groups: list[list[int]] = []
    for line_no, content, offset, opens_group in _logical_lines(text):
        action = _parse_action(content, line_no, offset, catalog)
        index = len(steps)
        steps.append(action)
        if opens_group or not groups:
            groups.append([index])
        else:
            groups[-1].append(index)
    if not steps:
        raise ParseError("empty script", 1, 1)
    return ActionScript(tuple(steps), tuple(tuple(g) for g in groups))
