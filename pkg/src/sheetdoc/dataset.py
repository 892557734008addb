"""The benchmark corpus: task instances pairing action-script code with
reference natural-language steps.

File format is JSON Lines (UTF-8, LF), one instance per line:

    {"id": ..., "workbook": ..., "categories": [...], "code": ...,
     "reference_steps": [...], "sheet_state": ..., "seed_workbook": ...?}

A sidecar manifest (<stem>.manifest.json) carries the designated sweep
subset ids and, optionally, per-category/per-workbook counts that must
match a recount. Reference steps may carry a "Step k." prefix on disk;
the loader strips it.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import SchemaError
from .xwapi.catalog import ActionCatalog, seed_catalog
from .xwapi.parser import parse_script
from .errors import ParseError
from .xwapi.validate import ERROR, validate_script

CATEGORIES = frozenset({
    "Entry and manipulation", "Management", "Formatting", "Chart", "Pivot table",
})

SWEEP_SUBSET_SIZE = 20

_STEP_PREFIX = re.compile(r"^\s*(?:-\s*)?Step\s+\d+\s*[.:]\s*")


@dataclass(frozen=True)
class TaskInstance:
    id: str
    workbook: str
    categories: frozenset[str]
    code: str
    reference_steps: tuple[str, ...]
    sheet_state: str
    seed_workbook: str | None = None


@dataclass(frozen=True)
class Manifest:
    category_counts: dict[str, int]
    workbook_counts: dict[str, int]
    sweep_ids: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    instances: tuple[TaskInstance, ...]
    manifest: Manifest = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.manifest is None:
            object.__setattr__(self, "manifest", recount(
                self.instances, _default_sweep_ids(self.instances)))

    def __len__(self) -> int:
        return len(self.instances)

    def by_id(self, instance_id: str) -> TaskInstance:
        for instance in self.instances:
            if instance.id == instance_id:
                return instance
        raise KeyError(instance_id)

    def sweep_subset(self) -> list[TaskInstance]:
        return [self.by_id(i) for i in self.manifest.sweep_ids]


def normalize_step(step: str) -> str:
    """Strip a leading "Step k." prefix, if present."""
    return _STEP_PREFIX.sub("", step).strip()


def recount(instances: tuple[TaskInstance, ...] | list[TaskInstance],
            sweep_ids: tuple[str, ...]) -> Manifest:
    category_counts: dict[str, int] = {}
    workbook_counts: dict[str, int] = {}
    for instance in instances:
        for category in sorted(instance.categories):
            category_counts[category] = category_counts.get(category, 0) + 1
        workbook_counts[instance.workbook] = workbook_counts.get(instance.workbook, 0) + 1
    return Manifest(
        category_counts=dict(sorted(category_counts.items())),
        workbook_counts=dict(sorted(workbook_counts.items())),
        sweep_ids=tuple(sweep_ids),
    )


def _default_sweep_ids(instances) -> tuple[str, ...]:
    return tuple(sorted(i.id for i in instances)[:SWEEP_SUBSET_SIZE])


def manifest_path(corpus_path: str | Path) -> Path:
    path = Path(corpus_path)
    return path.with_name(path.stem + ".manifest.json")


def _parse_instance(line_no: int, line: str, catalog: ActionCatalog,
                    problems: list[str]) -> TaskInstance | None:
    where = f"line {line_no}"
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        problems.append(f"{where}: not valid JSON: {exc}")
        return None
    if not isinstance(doc, dict):
        problems.append(f"{where}: instance must be an object")
        return None
    instance_id = doc.get("id")
    if not isinstance(instance_id, str) or not instance_id:
        problems.append(f"{where}: missing or empty id")
        return None
    where = f"instance {instance_id!r}"
    ok = True
    workbook = doc.get("workbook")
    if not isinstance(workbook, str) or not workbook:
        problems.append(f"{where}: missing workbook name")
        ok = False
    categories = doc.get("categories")
    if (not isinstance(categories, list) or not categories
            or not all(isinstance(c, str) for c in categories)):
        problems.append(f"{where}: categories must be a non-empty list of strings")
        ok = False
    else:
        unknown = sorted(set(categories) - CATEGORIES)
        if unknown:
            problems.append(f"{where}: unknown categories {unknown}")
            ok = False
    code = doc.get("code")
    if not isinstance(code, str) or not code.strip():
        problems.append(f"{where}: missing code block")
        ok = False
    else:
        try:
            script = parse_script(code, catalog)
        except ParseError as exc:
            problems.append(f"{where}: code does not parse: {exc}")
            ok = False
        else:
            errors = [d for d in validate_script(script, catalog) if d.severity == ERROR]
            for diag in errors:
                problems.append(f"{where}: code diagnostic: {diag}")
            ok = ok and not errors
    steps = doc.get("reference_steps")
    if (not isinstance(steps, list) or not steps
            or not all(isinstance(s, str) and s.strip() for s in steps)):
        problems.append(f"{where}: reference_steps must be a non-empty list of sentences")
        ok = False
    sheet_state = doc.get("sheet_state")
    if not isinstance(sheet_state, str) or not sheet_state:
        problems.append(f"{where}: missing sheet_state")
        ok = False
    seed_workbook = doc.get("seed_workbook")
    if seed_workbook is not None and not isinstance(seed_workbook, str):
        problems.append(f"{where}: seed_workbook must be a string path")
        ok = False
    if not ok:
        return None
    return TaskInstance(
        id=instance_id,
        workbook=workbook,
        categories=frozenset(categories),
        code=code,
        reference_steps=tuple(normalize_step(s) for s in steps),
        sheet_state=sheet_state,
        seed_workbook=seed_workbook,
    )


def load_corpus(path: str | Path, catalog: ActionCatalog | None = None) -> Corpus:
    """Load and validate a corpus; all violations are reported together."""
    path = Path(path)
    catalog = catalog or seed_catalog()
    problems: list[str] = []
    instances: list[TaskInstance] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        instance = _parse_instance(line_no, line, catalog, problems)
        if instance is None:
            continue
        if instance.id in seen:
            problems.append(
                f"duplicate id {instance.id!r} (lines {seen[instance.id]} and {line_no})")
            continue
        seen[instance.id] = line_no
        instances.append(instance)

    sweep_ids = _default_sweep_ids(instances)
    side = manifest_path(path)
    if side.exists():
        try:
            doc = json.loads(side.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            problems.append(f"manifest {side.name}: not valid JSON: {exc}")
            doc = {}
        raw_sweep = doc.get("sweep_ids")
        if raw_sweep is not None:
            missing = [i for i in raw_sweep if i not in seen]
            if missing:
                problems.append(f"manifest {side.name}: sweep ids not in corpus: {missing}")
            else:
                sweep_ids = tuple(raw_sweep)
        recounted = recount(instances, sweep_ids)
        for key in ("category_counts", "workbook_counts"):
            stored = doc.get(key)
            if stored is not None and stored != getattr(recounted, key):
                problems.append(f"manifest {side.name}: {key} do not match a recount")
    if problems:
        raise SchemaError(problems)
    return Corpus(tuple(instances), recount(instances, sweep_ids))


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write instances as JSONL plus the sidecar manifest; load(write(c)) == c."""
    path = Path(path)
    lines = []
    for instance in corpus.instances:
        doc = {
            "id": instance.id,
            "workbook": instance.workbook,
            "categories": sorted(instance.categories),
            "code": instance.code,
            "reference_steps": list(instance.reference_steps),
            "sheet_state": instance.sheet_state,
        }
        if instance.seed_workbook is not None:
            doc["seed_workbook"] = instance.seed_workbook
        lines.append(json.dumps(doc, ensure_ascii=False, sort_keys=True))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    manifest = recount(corpus.instances, corpus.manifest.sweep_ids)
    manifest_doc = {
        "category_counts": manifest.category_counts,
        "workbook_counts": manifest.workbook_counts,
        "sweep_ids": list(manifest.sweep_ids),
    }
    manifest_path(path).write_text(
        json.dumps(manifest_doc, indent=1, sort_keys=True) + "\n",
        encoding="utf-8", newline="\n")


def split_shots(corpus: Corpus, k: int, seed: int) -> tuple[list[TaskInstance], list[TaskInstance]]:
    """Deterministically split k exemplars from the evaluation instances."""
    n = len(corpus.instances)
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < corpus size {n}, got {k}")
    rng = random.Random(seed)
    chosen = set(rng.sample(range(n), k))
    exemplars = [corpus.instances[i] for i in sorted(chosen)]
    evaluation = [inst for i, inst in enumerate(corpus.instances) if i not in chosen]
    return exemplars, evaluation


# ------------------------------------------------------------ shipped data


def data_dir() -> Path:
    return Path(str(resources.files("sheetdoc").joinpath("data")))


def default_corpus_path() -> Path:
    return data_dir() / "corpus.jsonl"


def upstream_tasks_path() -> Path:
    return data_dir() / "upstream_tasks.json"


def load_upstream_tasks(path: str | Path | None = None) -> list[dict]:
    """The upstream task-list manifest: 28 workbook names with task counts."""
    doc = json.loads(Path(path or upstream_tasks_path()).read_text(encoding="utf-8"))
    if not isinstance(doc, list):
        raise SchemaError(["upstream task manifest must be a list"])
    return doc
