"""Evaluation orchestration: full runs, few-shot sweeps, macro pipelines.

Runs are hermetic by default (template baseline). Per-instance failures are
contained: the record carries the error, the instance is excluded from the
means, and the report header counts it. Records reduce in instance-id order,
so results do not depend on worker count or completion order.
"""

from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .dataset import Corpus, TaskInstance, split_shots
from .engine import DiffReport, Workbook, compare, execute, load_workbook
from .errors import (
    BackendError,
    CompletionParseError,
    EmptyInputError,
    ExecError,
    PromptSizeError,
    SchemaError,
)
from .metrics import METRIC_NAMES, MetricScore, score_instance
from .prompting import BackendConfig, PromptSettings, build_prompt, summarize
from .stats import (
    Sample,
    StatsReport,
    build_report,
    margin_of_error,
    mean,
    render_markdown,
    report_json,
)
from .transpile import SourceDialect, transpile
from .xwapi import (
    ActionCatalog,
    parse_script,
    seed_catalog,
    serialize_script,
    validate_script,
)
from .xwapi.validate import Diagnostic

DEFAULT_SEED = 13
DEFAULT_SHOTS = 4


@dataclass(frozen=True)
class BackendRun:
    backend: BackendConfig
    shots: int = DEFAULT_SHOTS


@dataclass(frozen=True)
class RunConfig:
    corpus: Path
    runs: tuple[BackendRun, ...]
    temperature: float = 0.5
    workers: int = 1
    out_dir: Path | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for run in self.runs:
            if run.shots < 0:
                raise ValueError("shot count must be >= 0")


@dataclass(frozen=True)
class EvalRecord:
    instance_id: str
    backend: str
    steps: tuple[str, ...] = ()
    score: MetricScore | None = None
    latency: float = 0.0
    error: str | None = None

    def __post_init__(self) -> None:
        if (self.score is None) == (self.error is None):
            raise ValueError("exactly one of score or error must be present")


@dataclass
class EvalOutcome:
    records: dict[str, list[EvalRecord]]  # backend name -> records by id
    report: StatsReport
    header_lines: list[str]
    had_errors: bool


def doc_snippets_for(code: str, catalog: ActionCatalog) -> list[str]:
    """Catalog documentation lines for the distinct actions in a code block."""
    script = parse_script(code, catalog)
    names = sorted({a.name for a in script.steps if a.name in catalog})
    snippets = []
    for name in names:
        entry = catalog.get(name)
        snippets.append(f"{entry.signature()} -- {entry.doc}")
    return snippets


def _evaluate_instance(instance: TaskInstance, exemplars: list[TaskInstance],
                       run: BackendRun, settings: PromptSettings,
                       catalog: ActionCatalog) -> EvalRecord:
    started = time.perf_counter()
    try:
        snippets = doc_snippets_for(instance.code, catalog)
        bundle = build_prompt(instance, exemplars, snippets, settings)
        summary = summarize(bundle, run.backend)
        score = score_instance(list(summary.steps), list(instance.reference_steps))
    except (PromptSizeError, BackendError, CompletionParseError,
            EmptyInputError, SchemaError) as exc:
        return EvalRecord(
            instance_id=instance.id,
            backend=run.backend.model_name,
            latency=time.perf_counter() - started,
            error=f"{type(exc).__name__}: {exc}",
        )
    return EvalRecord(
        instance_id=instance.id,
        backend=run.backend.model_name,
        steps=summary.steps,
        score=score,
        latency=time.perf_counter() - started,
    )


def _run_backend(corpus_instances: list[TaskInstance], exemplars: list[TaskInstance],
                 run: BackendRun, settings: PromptSettings, workers: int,
                 catalog: ActionCatalog) -> list[EvalRecord]:
    if workers == 1:
        records = [_evaluate_instance(inst, exemplars, run, settings, catalog)
                   for inst in corpus_instances]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(
                lambda inst: _evaluate_instance(inst, exemplars, run, settings, catalog),
                corpus_instances))
    records.sort(key=lambda r: r.instance_id)
    return records


def evaluate(config: RunConfig, corpus: Corpus,
             catalog: ActionCatalog | None = None) -> EvalOutcome:
    """Run every configured backend over the evaluation split and build the
    aggregate report."""
    catalog = catalog or seed_catalog()
    settings_by_run = {
        run: PromptSettings(
            temperature=config.temperature,
            context_budget_tokens=run.backend.context_budget_tokens,
        )
        for run in config.runs
    }
    all_records: dict[str, list[EvalRecord]] = {}
    header_lines: list[str] = []
    samples: dict[tuple[str, str], Sample] = {}
    had_errors = False
    for run in config.runs:
        exemplars, evaluation = split_shots(corpus, run.shots, config.seed)
        records = _run_backend(evaluation, exemplars, run, settings_by_run[run],
                               config.workers, catalog)
        all_records[run.backend.model_name] = records
        scored = [r for r in records if r.score is not None]
        failed = [r for r in records if r.error is not None]
        had_errors = had_errors or bool(failed)
        header_lines.append(
            f"backend {run.backend.model_name}: {run.shots}-shot, "
            f"{len(scored)} scored, {len(failed)} errors"
            + (f" (excluded: {', '.join(r.instance_id for r in failed)})" if failed else ""))
        if scored:
            for metric in METRIC_NAMES:
                values = tuple(getattr(r.score, metric) for r in scored)
                samples[(run.backend.model_name, metric)] = Sample(
                    values, f"{run.backend.model_name}/{metric}")
    report = build_report(samples) if samples else StatsReport([], [], {})
    return EvalOutcome(all_records, report, header_lines, had_errors)


def records_csv(records: list[EvalRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", *METRIC_NAMES, "error"])
    for record in records:
        if record.score is None:
            writer.writerow([record.instance_id, "", "", "", "", record.error])
        else:
            writer.writerow([
                record.instance_id,
                *(f"{getattr(record.score, m):.6f}" for m in METRIC_NAMES),
                "",
            ])
    return buffer.getvalue()


def write_eval_outputs(outcome: EvalOutcome, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for backend_name, records in outcome.records.items():
        (out_dir / f"scores_{backend_name}.csv").write_text(
            records_csv(records), encoding="utf-8")
    (out_dir / "report.md").write_text(
        render_markdown(outcome.report, outcome.header_lines), encoding="utf-8")
    (out_dir / "report.json").write_text(report_json(outcome.report), encoding="utf-8")


# ------------------------------------------------------------------ sweep


@dataclass(frozen=True)
class SweepRow:
    shots: int
    metric: str
    mean: float
    moe: float


def sweep(config: RunConfig, corpus: Corpus, shots_list: list[int],
          subset_size: int = 20, catalog: ActionCatalog | None = None) -> list[SweepRow]:
    """Evaluate the designated sweep subset at each shot count.

    Exemplars are drawn (seeded) from outside the subset, so the same
    subset instance is never its own exemplar.
    """
    if not shots_list:
        return []
    catalog = catalog or seed_catalog()
    if len(corpus.manifest.sweep_ids) < subset_size:
        raise ValueError(
            f"manifest designates {len(corpus.manifest.sweep_ids)} sweep ids, "
            f"need {subset_size}")
    if max(shots_list) + subset_size > len(corpus):
        raise ValueError(
            f"max shots {max(shots_list)} + subset {subset_size} exceeds "
            f"corpus size {len(corpus)}")
    subset_ids = list(corpus.manifest.sweep_ids[:subset_size])
    subset = [corpus.by_id(i) for i in subset_ids]
    pool = [inst for inst in corpus.instances if inst.id not in set(subset_ids)]
    shuffled = list(pool)
    random.Random(config.seed).shuffle(shuffled)

    run = config.runs[0]
    settings = PromptSettings(
        temperature=config.temperature,
        context_budget_tokens=run.backend.context_budget_tokens)
    rows: list[SweepRow] = []
    for k in shots_list:
        exemplars = shuffled[:k]
        records = _run_backend(subset, exemplars, run, settings, config.workers, catalog)
        scored = [r for r in records if r.score is not None]
        for metric in METRIC_NAMES:
            sample = Sample(tuple(getattr(r.score, metric) for r in scored),
                            f"{k}-shot/{metric}")
            rows.append(SweepRow(k, metric, mean(sample), margin_of_error(sample)))
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["shots", "metric", "mean", "moe"])
    for row in rows:
        writer.writerow([row.shots, row.metric, f"{row.mean:.6f}", f"{row.moe:.6f}"])
    return buffer.getvalue()


# ----------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class _PipelineTarget:
    code: str
    sheet_state: str
    reference_steps: tuple[str, ...] = ()


@dataclass
class PipelineResult:
    script_text: str
    diagnostics: list[Diagnostic]
    steps: tuple[str, ...]
    book: Workbook
    diff: DiffReport


def run_pipeline(macro_path: Path, dialect: SourceDialect, backend: BackendConfig,
                 seed_workbook: Path | None = None,
                 expected_workbook: Path | None = None,
                 catalog: ActionCatalog | None = None) -> PipelineResult:
    """Transpile a macro, execute it, describe it, and check the result."""
    catalog = catalog or seed_catalog()
    source = macro_path.read_text(encoding="utf-8")
    script, diagnostics = transpile(source, dialect, catalog)
    diagnostics = diagnostics + validate_script(script, catalog)
    book = load_workbook(seed_workbook) if seed_workbook else Workbook.blank()
    try:
        execute(script, book)
    except ExecError as exc:
        raise ExecError(exc.step_index, f"execute stage failed: {exc.message}") from exc
    script_text = serialize_script(script)
    target = _PipelineTarget(code=script_text, sheet_state="(pipeline run; state not captured)")
    bundle = build_prompt(target, [], doc_snippets_for(script_text, catalog))
    summary = summarize(bundle, backend)
    expected = load_workbook(expected_workbook) if expected_workbook else book
    diff = compare(expected, book, tol=1e-6)
    return PipelineResult(script_text, diagnostics, summary.steps, book, diff)
