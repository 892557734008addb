"""Few-shot prompt construction and pluggable summarization backends.

A prompt bundle is: one developer instruction, k exemplar user/assistant
pairs, and a final user turn (2k + 2 messages). Each user turn carries the
action-script code, a documentation block, and the sheet state; assistant
turns carry "- Step k." lines.

Two backend kinds ship: "remote-chat" posts a chat-completion request
({model, messages, temperature, max_tokens}, bearer token from a named
environment variable) to a configured endpoint; "template-baseline" is a
deterministic offline stand-in that describes each step group from a fixed
per-action template table, which keeps end-to-end runs hermetic.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

import requests

from .errors import (
    BackendError,
    BackendTimeout,
    CompletionParseError,
    PromptSizeError,
)
from .xwapi.actions import ActionScript, AtomicAction, Formula
from .xwapi.catalog import seed_catalog
from .xwapi.parser import parse_script
from .xwapi.refs import CellRef, RangeRef

ROLES = ("developer", "user", "assistant")

INSTRUCTION = (
    "Summarize the each sub-step of instructions into explanations in natural language.\n"
    "Be brief and do not provide verbose explanations.\n"
    "Do not add text formatting such as bold, italic.\n"
    "Do not provide extra notes or postscriptum.\n"
    "Avoid redundant steps and provide minimal steps"
)

DOC_HEADER = "Here is the supplementary documentation you can reference:"
STATE_HEADER = "Here is the corresponding sheet state:"

_STEP_LINE = re.compile(r"^\s*-?\s*Step\s+(\d+)\s*[.:]\s*(.*\S)\s*$")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass(frozen=True)
class PromptBundle:
    messages: tuple[ChatMessage, ...]
    shot_count: int
    temperature: float
    max_new_tokens: int
    timeout_seconds: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")


@dataclass(frozen=True)
class PromptSettings:
    temperature: float = 0.5
    max_new_tokens: int = 256
    timeout_seconds: int = 50
    context_budget_tokens: int = 128_000


@dataclass(frozen=True)
class BackendConfig:
    kind: str
    model_name: str
    endpoint: str | None = None
    auth_env: str | None = None
    context_budget_tokens: int = 128_000
    retries: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("remote-chat", "template-baseline"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote-chat" and not (self.endpoint and self.auth_env):
            raise ValueError("remote-chat backends need an endpoint and an auth env var")


@dataclass(frozen=True)
class Summary:
    """Parsed step strings plus the raw completion for audit."""

    steps: tuple[str, ...]
    raw: str


def estimate_tokens(text: str) -> int:
    """Cheap context estimate: characters / 4, rounded up."""
    return (len(text) + 3) // 4


def render_user_turn(code: str, doc_snippets: list[str], sheet_state: str) -> str:
    return (
        f"{code}\n\n"
        f"{DOC_HEADER}\n{doc_snippets!r}\n"
        f"{STATE_HEADER}\nSheet state: {sheet_state}"
    )


def render_steps(steps: list[str] | tuple[str, ...]) -> str:
    return "\n".join(f"- Step {k}. {text}" for k, text in enumerate(steps, 1))


def build_prompt(target, exemplars: list, doc_snippets: list[str],
                 settings: PromptSettings = PromptSettings()) -> PromptBundle:
    """Assemble the chat prompt for one task instance.

    target and exemplars carry .code, .reference_steps, and .sheet_state
    (as dataset.TaskInstance does). Raises PromptSizeError when the
    character/4 estimate exceeds the settings' context budget.
    """
    messages: list[ChatMessage] = [ChatMessage("developer", INSTRUCTION)]
    for exemplar in exemplars:
        messages.append(ChatMessage("user", render_user_turn(
            exemplar.code, doc_snippets, exemplar.sheet_state)))
        messages.append(ChatMessage("assistant", render_steps(exemplar.reference_steps)))
    messages.append(ChatMessage("user", render_user_turn(
        target.code, doc_snippets, target.sheet_state)))
    estimated = estimate_tokens("".join(m.content for m in messages))
    if estimated > settings.context_budget_tokens:
        raise PromptSizeError(estimated, settings.context_budget_tokens)
    return PromptBundle(
        messages=tuple(messages),
        shot_count=len(exemplars),
        temperature=settings.temperature,
        max_new_tokens=settings.max_new_tokens,
        timeout_seconds=settings.timeout_seconds,
    )


def parse_steps(completion: str) -> list[str]:
    """Extract "- Step k." lines in order; prefixes are stripped.

    Raises CompletionParseError (carrying the raw text) when no step line
    is found.
    """
    steps = [match.group(2) for line in completion.splitlines()
             if (match := _STEP_LINE.match(line))]
    if not steps:
        raise CompletionParseError(completion)
    return steps


# ------------------------------------------------------ template baseline


def _render_value(value) -> str:
    if isinstance(value, Formula):
        return value.source
    if isinstance(value, (RangeRef, CellRef)):
        return value.a1()
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    if isinstance(value, (int, float)):
        return str(value)
    return f'"{value}"'


def _range_phrase(value) -> tuple[str, str | None]:
    """(cell text without sheet, sheet name or None)."""
    if isinstance(value, RangeRef):
        bare = RangeRef(value.start, value.end)
        return bare.a1(), value.sheet
    if isinstance(value, CellRef):
        return CellRef(value.column, value.row).a1(), value.sheet
    return str(value), None


def _a1(value) -> str:
    if isinstance(value, (RangeRef, CellRef)):
        return value.a1()
    return str(value)


def _describe(action: AtomicAction) -> str:
    name = action.name
    if action.unknown or name == "Unknown":
        raw = action.get("raw", name)
        return f"Perform the recorded statement: {raw}."
    if name == "Write":
        cell, sheet = _range_phrase(action.get("range"))
        where = "cell" if ":" not in cell else "cells"
        suffix = f" on sheet {sheet}" if sheet else ""
        return f"Write {_render_value(action.get('value'))} to {where} {cell}{suffix}."
    if name == "CopyPaste":
        return f"Copy {_a1(action.get('source'))} to {_a1(action.get('destination'))}."
    if name == "CreateSheet":
        return f"Create a new sheet named {action.get('sheetName')}."
    if name == "AutoFill":
        return f"Autofill {_a1(action.get('destination'))} from {_a1(action.get('source'))}."
    if name == "CreateChart":
        return (f"Create a {action.get('chartType')} chart named "
                f"\"{action.get('chartName')}\" from {_a1(action.get('source'))} "
                f"on sheet {action.get('destSheet')}.")
    if name == "SetChartLegend":
        return (f"Set the legend of chart \"{action.get('chartName')}\" "
                f"to the {action.get('position')}.")
    if name == "Filter":
        return (f"Filter {_a1(action.get('source'))} on field "
                f"{_render_value(action.get('fieldIndex'))} with criteria "
                f"\"{action.get('criteria')}\".")
    if name == "CreatePivotTable":
        return (f"Create a pivot table named \"{action.get('name')}\" from "
                f"{_a1(action.get('source'))} on sheet {action.get('destSheet')}.")
    if name == "SetFormat":
        return (f"Set {action.get('property')} to {_render_value(action.get('value'))} "
                f"on {_a1(action.get('range'))}.")
    if name == "FreezePanes":
        return f"Freeze panes at {_a1(action.get('range'))}."
    return f"Apply {name}."


def template_baseline(script: ActionScript) -> list[str]:
    """One deterministic sentence per step group, taken from the group's
    first action."""
    return [_describe(group[0]) for group in script.grouped()]


# ------------------------------------------------------------- backends


def _extract_code(bundle: PromptBundle) -> str:
    final_user = bundle.messages[-1]
    code, _, _ = final_user.content.partition(f"\n\n{DOC_HEADER}")
    return code


def _baseline_completion(bundle: PromptBundle) -> str:
    script = parse_script(_extract_code(bundle), seed_catalog())
    return render_steps(template_baseline(script))


def _remote_completion(bundle: PromptBundle, backend: BackendConfig) -> str:
    token = os.environ.get(backend.auth_env or "", "")
    if not token:
        raise BackendError(f"environment variable {backend.auth_env!r} is not set")
    payload = {
        "model": backend.model_name,
        "messages": [{"role": m.role, "content": m.content} for m in bundle.messages],
        "temperature": bundle.temperature,
        "max_tokens": bundle.max_new_tokens,
    }
    last_error: Exception | None = None
    for _ in range(backend.retries + 1):
        try:
            response = requests.post(
                backend.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {token}"},
                timeout=bundle.timeout_seconds,
            )
        except requests.Timeout as exc:
            raise BackendTimeout(
                f"no answer within {bundle.timeout_seconds} s") from exc
        except requests.RequestException as exc:
            last_error = exc
            continue
        if response.status_code != 200:
            last_error = BackendError(
                f"backend returned HTTP {response.status_code}: {response.text[:200]}")
            continue
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion payload: {exc}") from exc
    raise BackendError(f"backend unreachable: {last_error}") from last_error


def summarize(bundle: PromptBundle, backend: BackendConfig) -> Summary:
    """Run one bundle through a backend and parse the step lines.

    Raises BackendTimeout / BackendError on transport problems and
    CompletionParseError when the completion has no step lines. Parsed
    steps are never empty strings.
    """
    if backend.kind == "template-baseline":
        raw = _baseline_completion(bundle)
    else:
        raw = _remote_completion(bundle, backend)
    return Summary(steps=tuple(parse_steps(raw)), raw=raw)
