"""The action catalog: known action signatures and their argument types.

The built-in catalog covers the ten core actions. Extra actions can be
loaded from a definitions file (one signature per line); user entries may
never silently overwrite a built-in one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CatalogError

ARG_TYPES = ("str", "number", "range", "cell", "formula", "any")


@dataclass(frozen=True)
class ArgSpec:
    key: str
    type: str
    required: bool = True

    def __post_init__(self) -> None:
        if self.type not in ARG_TYPES:
            raise CatalogError(f"unknown argument type {self.type!r} for {self.key!r}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    args: tuple[ArgSpec, ...]
    doc: str = ""
    aliases: dict[str, str] = field(default_factory=dict)

    def required_keys(self) -> tuple[str, ...]:
        return tuple(a.key for a in self.args if a.required)

    def arg_spec(self, key: str) -> ArgSpec | None:
        for spec in self.args:
            if spec.key == key:
                return spec
        return None

    def signature(self) -> str:
        parts = []
        for spec in self.args:
            mark = "" if spec.required else "?"
            parts.append(f"{spec.key}{mark}: {spec.type}")
        return f"{self.name}({', '.join(parts)})"


def _entry(name: str, args: list[tuple[str, str]], doc: str,
           optional: tuple[str, ...] = (), aliases: dict[str, str] | None = None) -> CatalogEntry:
    specs = tuple(ArgSpec(key, typ, key not in optional) for key, typ in args)
    return CatalogEntry(name, specs, doc, aliases or {})


SEED_ENTRIES: tuple[CatalogEntry, ...] = (
    _entry("Write", [("range", "range"), ("value", "any")],
           "Write a value or formula into every cell of the range."),
    _entry("CopyPaste", [("source", "range"), ("destination", "range")],
           "Copy values and formulas from source to destination, adjusting relative references."),
    _entry("CreateSheet", [("sheetName", "str")],
           "Append a new empty sheet with the given name.",
           aliases={"name": "sheetName"}),
    _entry("AutoFill", [("source", "range"), ("destination", "range")],
           "Replicate the source cells across the destination, adjusting relative references."),
    _entry("CreateChart", [("source", "range"), ("destSheet", "str"),
                           ("chartType", "str"), ("chartName", "str")],
           "Create a chart of the given type from the source range on the destination sheet."),
    _entry("SetChartLegend", [("chartName", "str"), ("position", "str")],
           "Place the named chart's legend at the given position."),
    _entry("Filter", [("source", "range"), ("fieldIndex", "number"), ("criteria", "str")],
           "Apply a criteria filter to the 1-based field of the source range."),
    _entry("CreatePivotTable", [("source", "range"), ("destSheet", "str"), ("name", "str"),
                                ("rows", "str"), ("columns", "str"), ("values", "str")],
           "Create a pivot table from the source range; rows/columns/values are "
           "comma-separated field name lists and may be empty, but not all three."),
    _entry("SetFormat", [("range", "range"), ("property", "str"), ("value", "any")],
           "Record a formatting property value for the range."),
    _entry("FreezePanes", [("range", "range")],
           "Freeze the rows above and the columns left of the range's top-left cell."),
)

_DEF_LINE = re.compile(
    r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*(?:--\s*(.*))?$"
)
_DEF_ARG = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(\?)?\s*:\s*([a-z]+)$")


class ActionCatalog:
    """Mapping from action name to its signature; extensible at runtime."""

    def __init__(self, entries: tuple[CatalogEntry, ...] = SEED_ENTRIES):
        self._entries: dict[str, CatalogEntry] = {}
        self._seed_names: set[str] = set()
        for entry in entries:
            self._entries[entry.name] = entry
        self._seed_names = set(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def get(self, name: str) -> CatalogEntry | None:
        return self._entries.get(name)

    def names(self) -> list[str]:
        return sorted(self._entries)

    def canonical_key(self, action_name: str, key: str) -> str:
        entry = self._entries.get(action_name)
        if entry is None:
            return key
        return entry.aliases.get(key, key)

    def add(self, entry: CatalogEntry) -> None:
        if entry.name in self._entries:
            raise CatalogError(f"action {entry.name!r} already defined")
        self._entries[entry.name] = entry

    def load_definitions(self, path: str | Path) -> int:
        """Load `Name(arg:type, arg?:type) -- doc` lines; returns entries added.

        Collisions with existing entries (built-in or previously loaded) are
        an error, never a silent overwrite.
        """
        added = 0
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            match = _DEF_LINE.match(line)
            if not match:
                raise CatalogError(f"{path}:{lineno}: malformed definition {line!r}")
            name, arg_text, doc = match.group(1), match.group(2), match.group(3) or ""
            specs = []
            for part in filter(None, (p.strip() for p in arg_text.split(","))):
                arg_match = _DEF_ARG.match(part)
                if not arg_match:
                    raise CatalogError(f"{path}:{lineno}: malformed argument {part!r}")
                specs.append(ArgSpec(arg_match.group(1), arg_match.group(3),
                                     required=arg_match.group(2) is None))
            self.add(CatalogEntry(name, tuple(specs), doc.strip()))
            added += 1
        return added


def seed_catalog() -> ActionCatalog:
    return ActionCatalog(SEED_ENTRIES)
