"""Static validation of action scripts against a catalog.

Validation never fails; it returns diagnostics. An empty list means the
script is fully catalog-conformant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .actions import ActionScript, AtomicAction, Formula
from .catalog import ActionCatalog
from .refs import CellRef, RangeRef

ERROR = "error"
WARNING = "warning"
INFO = "info"


@dataclass(frozen=True)
class Diagnostic:
    step: int
    severity: str
    message: str

    def __str__(self) -> str:
        return f"step {self.step}: {self.severity}: {self.message}"


def _type_ok(value, expected: str) -> bool:
    if expected == "any":
        return True
    if expected == "number":
        return isinstance(value, (int, float))
    if expected == "range":
        return isinstance(value, RangeRef)
    if expected == "cell":
        return isinstance(value, CellRef)
    if expected == "formula":
        return isinstance(value, Formula)
    # A formula is a string value that kept its leading "=".
    return isinstance(value, (str, Formula))


def _check_action(index: int, action: AtomicAction, catalog: ActionCatalog) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for arg in action.args:
        if isinstance(arg.value, Formula) and "$" in arg.value.source:
            diags.append(Diagnostic(
                index, WARNING,
                f"argument {arg.key}: absolute references ('$') are treated as relative",
            ))
    entry = catalog.get(action.name)
    if entry is None:
        diags.append(Diagnostic(index, WARNING, f"unknown action {action.name}"))
        return diags
    present = set(action.arg_keys())
    for key in entry.required_keys():
        if key not in present:
            diags.append(Diagnostic(index, ERROR, f"missing required argument {key}"))
    for arg in action.args:
        spec = entry.arg_spec(arg.key)
        if spec is None:
            diags.append(Diagnostic(index, WARNING, f"unexpected argument {arg.key}"))
            continue
        if spec.type in ("range", "cell") and isinstance(arg.value, str):
            diags.append(Diagnostic(
                index, ERROR, f"malformed range in argument {arg.key}: {arg.value!r}"))
        elif not _type_ok(arg.value, spec.type):
            diags.append(Diagnostic(
                index, ERROR,
                f"argument {arg.key} expects {spec.type}, got {type(arg.value).__name__}",
            ))
    return diags


def validate_script(script: ActionScript, catalog: ActionCatalog) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for index, action in enumerate(script.steps):
        diags.extend(_check_action(index, action, catalog))
    return diags


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diagnostics)
