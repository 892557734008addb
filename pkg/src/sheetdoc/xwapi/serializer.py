"""Canonical text form for action scripts; parse(serialize(s)) == s."""

from __future__ import annotations

from .actions import ActionScript, AtomicAction, Formula
from .refs import CellRef, RangeRef


def _escape(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\n", "\\n").replace("\t", "\\t")


def _render_value(value) -> str:
    if isinstance(value, Formula):
        return f'"{_escape(value.source)}"'
    if isinstance(value, (RangeRef, CellRef)):
        return f'"{value.a1()}"'
    if isinstance(value, bool):
        raise TypeError("boolean argument values are not part of the script grammar")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return f'"{_escape(value)}"'


def serialize_action(action: AtomicAction) -> str:
    args = ", ".join(f"{arg.key}={_render_value(arg.value)}" for arg in action.args)
    return f"{action.name}({args})"


def serialize_script(script: ActionScript) -> str:
    """Render the canonical bullet form, one "- -" line per step group."""
    lines: list[str] = []
    for group in script.step_groups:
        for position, index in enumerate(group):
            prefix = "- - " if position == 0 else "  - "
            lines.append(prefix + serialize_action(script.steps[index]))
    return "\n".join(lines)
