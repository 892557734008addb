"""Atomic spreadsheet actions and ordered action scripts.

All types are immutable after construction; equality is structural.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .refs import CellRef, RangeRef


@dataclass(frozen=True)
class Formula:
    """A formula-valued argument; the source always keeps its leading '='."""

    source: str

    def __post_init__(self) -> None:
        if not self.source.startswith("="):
            raise ValueError(f"formula source must start with '=', got {self.source!r}")


@dataclass(frozen=True)
class ActionArg:
    key: str
    value: str | int | float | Formula | RangeRef | CellRef


@dataclass(frozen=True)
class AtomicAction:
    """One named spreadsheet operation with keyword arguments.

    Actions whose name is not in the catalog are kept but flagged, so a
    parse never fails on an unknown name.
    """

    name: str
    args: tuple[ActionArg, ...] = ()
    unknown: bool = False

    def get(self, key: str, default=None):
        for arg in self.args:
            if arg.key == key:
                return arg.value
        return default

    def arg_keys(self) -> tuple[str, ...]:
        return tuple(arg.key for arg in self.args)


def _default_groups(count: int) -> tuple[tuple[int, ...], ...]:
    return tuple((i,) for i in range(count))


@dataclass(frozen=True)
class ActionScript:
    """Ordered action sequence with a partition into human-visible steps.

    step_groups defaults to one group per action and always covers every
    action exactly once, in order.
    """

    steps: tuple[AtomicAction, ...]
    step_groups: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        steps = tuple(self.steps)
        groups = tuple(tuple(g) for g in self.step_groups)
        if not groups:
            groups = _default_groups(len(steps))
        covered = [i for group in groups for i in group]
        if covered != list(range(len(steps))):
            raise ValueError("step_groups must cover every step exactly once, in order")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "step_groups", groups)

    def grouped(self) -> list[list[AtomicAction]]:
        return [[self.steps[i] for i in group] for group in self.step_groups]
