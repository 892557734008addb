"""Command-line front end.

Verbs: parse, validate, serialize, transpile, execute, compare, prompt,
evaluate, sweep, rates, rag-index, rag-query, pipeline.

Exit codes: 0 success, 1 contained evaluation errors or a failed
comparison, 2 usage/config errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .dataset import default_corpus_path, load_corpus, split_shots
from .engine import Workbook, compare, execute, load_workbook, save_workbook
from .errors import ExecError, ParseError, SchemaError, SheetDocError
from .harness import (
    DEFAULT_SEED,
    DEFAULT_SHOTS,
    BackendRun,
    RunConfig,
    doc_snippets_for,
    evaluate,
    run_pipeline,
    sweep,
    sweep_csv,
    write_eval_outputs,
)
from .metrics import RateScore, rates
from .prompting import BackendConfig, PromptSettings, build_prompt
from .retrieval import (
    DEFAULT_MAX_CHARS,
    DEFAULT_OVERLAP,
    DEFAULT_TOP_K,
    build_index,
    chunk_documents,
    load_index,
    retrieve,
    save_index,
)
from .transpile import SourceDialect, transpile
from .xwapi import (
    Formula,
    RangeRef,
    CellRef,
    has_errors,
    parse_script,
    seed_catalog,
    serialize_script,
    validate_script,
)

EXIT_OK = 0
EXIT_CONTAINED = 1
EXIT_USAGE = 2


def _load_catalog(args) -> object:
    catalog = seed_catalog()
    if getattr(args, "catalog", None):
        catalog.load_definitions(args.catalog)
    return catalog


def _arg_value_json(value):
    if isinstance(value, Formula):
        return value.source
    if isinstance(value, (RangeRef, CellRef)):
        return value.a1()
    return value


def cmd_parse(args) -> int:
    catalog = _load_catalog(args)
    script = parse_script(Path(args.infile).read_text(encoding="utf-8"), catalog)
    doc = {
        "steps": [
            {"name": a.name,
             "args": {arg.key: _arg_value_json(arg.value) for arg in a.args},
             **({"unknown": True} if a.unknown else {})}
            for a in script.steps
        ],
        "step_groups": [list(g) for g in script.step_groups],
    }
    print(json.dumps(doc, indent=1))
    return EXIT_OK


def cmd_serialize(args) -> int:
    catalog = _load_catalog(args)
    script = parse_script(Path(args.infile).read_text(encoding="utf-8"), catalog)
    text = serialize_script(script)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    catalog = _load_catalog(args)
    script = parse_script(Path(args.infile).read_text(encoding="utf-8"), catalog)
    diagnostics = validate_script(script, catalog)
    for diag in diagnostics:
        print(diag)
    return EXIT_CONTAINED if has_errors(diagnostics) else EXIT_OK


def cmd_transpile(args) -> int:
    catalog = _load_catalog(args)
    dialect = SourceDialect(args.dialect)
    script, diagnostics = transpile(
        Path(args.infile).read_text(encoding="utf-8"), dialect, catalog)
    text = serialize_script(script)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    for diag in diagnostics:
        print(diag, file=sys.stderr)
    return EXIT_OK


def cmd_execute(args) -> int:
    catalog = _load_catalog(args)
    script = parse_script(Path(args.script).read_text(encoding="utf-8"), catalog)
    diagnostics = validate_script(script, catalog)
    if has_errors(diagnostics):
        for diag in diagnostics:
            print(diag, file=sys.stderr)
        return EXIT_USAGE
    book = load_workbook(args.book) if args.book else Workbook.blank()
    execute(script, book)
    save_workbook(book, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    expected = load_workbook(args.expected)
    actual = load_workbook(args.actual)
    report = compare(expected, actual, tol=args.tol)
    for mismatch in report.mismatches:
        print(mismatch)
    print(f"equivalent: {report.equivalent} ({len(report.mismatches)} mismatches)")
    return EXIT_OK if report.equivalent else EXIT_CONTAINED


def cmd_prompt(args) -> int:
    catalog = _load_catalog(args)
    corpus = load_corpus(args.corpus or default_corpus_path(), catalog)
    exemplars, evaluation = split_shots(corpus, args.shots, args.seed)
    target = corpus.by_id(args.id) if args.id else evaluation[0]
    if any(e.id == target.id for e in exemplars):
        print(f"instance {target.id} is an exemplar under this seed", file=sys.stderr)
        return EXIT_USAGE
    bundle = build_prompt(
        target, exemplars, doc_snippets_for(target.code, catalog),
        PromptSettings(temperature=args.temperature))
    doc = {
        "shot_count": bundle.shot_count,
        "temperature": bundle.temperature,
        "max_new_tokens": bundle.max_new_tokens,
        "timeout_seconds": bundle.timeout_seconds,
        "messages": [{"role": m.role, "content": m.content} for m in bundle.messages],
    }
    print(json.dumps(doc, indent=1))
    return EXIT_OK


def _backend_from_table(table: dict) -> BackendRun:
    config = BackendConfig(
        kind=table.get("kind", "template-baseline"),
        model_name=table.get("model", table.get("model_name", "baseline")),
        endpoint=table.get("endpoint"),
        auth_env=table.get("auth_env"),
        context_budget_tokens=int(table.get("context_budget_tokens", 128_000)),
        retries=int(table.get("retries", 0)),
    )
    return BackendRun(config, int(table.get("shots", DEFAULT_SHOTS)))


def _run_config(args) -> RunConfig:
    corpus = Path(args.corpus) if args.corpus else default_corpus_path()
    temperature = args.temperature
    workers = args.workers
    seed = args.seed
    shots = getattr(args, "shots", DEFAULT_SHOTS)
    default_shots = shots if isinstance(shots, int) else DEFAULT_SHOTS
    runs: list[BackendRun] = []
    if args.config:
        doc = tomllib.loads(Path(args.config).read_text(encoding="utf-8"))
        corpus = Path(doc.get("corpus", corpus))
        temperature = float(doc.get("temperature", temperature))
        workers = int(doc.get("workers", workers))
        seed = int(doc.get("seed", seed))
        runs = [_backend_from_table(t) for t in doc.get("backend", [])]
    if not runs:
        runs = [BackendRun(
            BackendConfig(kind="template-baseline", model_name=args.backend_name),
            default_shots)]
    return RunConfig(
        corpus=corpus,
        runs=tuple(runs),
        temperature=temperature,
        workers=workers,
        out_dir=Path(args.out) if args.out else None,
        seed=seed,
    )


def cmd_evaluate(args) -> int:
    catalog = _load_catalog(args)
    config = _run_config(args)
    corpus = load_corpus(config.corpus, catalog)
    outcome = evaluate(config, corpus, catalog)
    out_dir = config.out_dir or Path("out")
    write_eval_outputs(outcome, out_dir)
    for line in outcome.header_lines:
        print(line)
    print(f"report written to {out_dir}")
    return EXIT_CONTAINED if outcome.had_errors else EXIT_OK


def _parse_shots(text: str) -> list[int]:
    shots: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, _, hi = part.partition("-")
            shots.extend(range(int(lo), int(hi) + 1))
        else:
            shots.append(int(part))
    return shots


def cmd_sweep(args) -> int:
    catalog = _load_catalog(args)
    config = _run_config(args)
    corpus = load_corpus(config.corpus, catalog)
    rows = sweep(config, corpus, _parse_shots(args.shots), args.subset_size, catalog)
    text = sweep_csv(rows)
    out_dir = config.out_dir or Path("out")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.csv").write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_rates(args) -> int:
    total = exec_count = pass_count = 0
    with open(args.results, newline="", encoding="utf-8") as handle:
        for row in csv.reader(handle):
            if not row or row[0].strip().lower() in ("task_id", "id"):
                continue
            total += 1
            exec_count += int(row[1])
            pass_count += int(row[2])
    score = RateScore(total, exec_count, pass_count)
    exec_at_1, pass_at_1 = rates(score)
    print(f"total: {total}")
    print(f"exec_count: {exec_count}")
    print(f"pass_count: {pass_count}")
    print(f"exec@1: {exec_at_1:.2f}")
    print(f"pass@1: {pass_at_1:.2f}")
    return EXIT_OK


def cmd_rag_index(args) -> int:
    docs = []
    root = Path(args.docs)
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.suffix.lower() in (".txt", ".md", ".html"):
            docs.append((str(path.relative_to(root)), path.read_text(encoding="utf-8")))
    if not docs:
        print(f"no documents under {root}", file=sys.stderr)
        return EXIT_USAGE
    chunks = chunk_documents(docs, args.max_chars, args.overlap)
    index = build_index(chunks)
    save_index(index, args.out)
    print(f"indexed {len(docs)} documents into {len(chunks)} chunks -> {args.out}")
    return EXIT_OK


def cmd_rag_query(args) -> int:
    index = load_index(args.index)
    for chunk, score in retrieve(index, args.query, args.k):
        snippet = " ".join(chunk.text.split())[:100]
        print(f"{score:.4f}\t{chunk.id}\t{snippet}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    catalog = _load_catalog(args)
    backend = BackendConfig(kind="template-baseline", model_name=args.backend_name)
    result = run_pipeline(
        Path(args.infile), SourceDialect(args.dialect), backend,
        seed_workbook=Path(args.book) if args.book else None,
        expected_workbook=Path(args.expected) if args.expected else None,
        catalog=catalog)
    print(result.script_text)
    print()
    for k, step in enumerate(result.steps, 1):
        print(f"Step {k}. {step}")
    for diag in result.diagnostics:
        print(diag, file=sys.stderr)
    if args.out:
        save_workbook(result.book, args.out)
    print()
    print(f"equivalent: {result.diff.equivalent} ({len(result.diff.mismatches)} mismatches)")
    for mismatch in result.diff.mismatches:
        print(mismatch)
    return EXIT_OK if result.diff.equivalent else EXIT_CONTAINED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sheetdoc",
        description="Spreadsheet operations documentation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--catalog", help="extra action definitions file")

    p = sub.add_parser("parse", help="parse a script file and print its structure")
    common(p)
    p.add_argument("infile")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("serialize", help="parse a script and print the canonical text")
    common(p)
    p.add_argument("infile")
    p.add_argument("--out")
    p.set_defaults(func=cmd_serialize)

    p = sub.add_parser("validate", help="print diagnostics for a script file")
    common(p)
    p.add_argument("infile")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transpile", help="translate macro code into script text")
    common(p)
    p.add_argument("--dialect", choices=[d.value for d in SourceDialect], required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("execute", help="run a script against a workbook file")
    common(p)
    p.add_argument("--script", required=True)
    p.add_argument("--book", help="seed workbook (default: blank)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_execute)

    p = sub.add_parser("compare", help="compare two workbook files")
    p.add_argument("expected")
    p.add_argument("actual")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("prompt", help="print the prompt bundle for an instance")
    common(p)
    p.add_argument("--corpus")
    p.add_argument("--id", help="instance id (default: first evaluation instance)")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--temperature", type=float, default=0.5)
    p.set_defaults(func=cmd_prompt)

    def eval_common(p, with_shot_count=True):
        common(p)
        p.add_argument("--corpus")
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--out")
        if with_shot_count:
            p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--temperature", type=float, default=0.5)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--backend-name", default="baseline",
                       help="model name for the default template baseline")

    p = sub.add_parser("evaluate", help="run backends over the corpus and report")
    eval_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="few-shot sweep over the designated subset")
    eval_common(p, with_shot_count=False)
    p.add_argument("--shots", default="1-19",
                   help="shot counts to sweep, e.g. 1-19 or 1,2,4")
    p.add_argument("--subset-size", type=int, default=20)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rates", help="exec@1/pass@1 from a results CSV")
    p.add_argument("--results", required=True,
                   help="CSV of task_id,executed,passed rows")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("rag-index", help="chunk and index documentation files")
    p.add_argument("--docs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-chars", type=int, default=DEFAULT_MAX_CHARS)
    p.add_argument("--overlap", type=int, default=DEFAULT_OVERLAP)
    p.set_defaults(func=cmd_rag_index)

    p = sub.add_parser("rag-query", help="query a saved index")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("-k", type=int, default=DEFAULT_TOP_K)
    p.set_defaults(func=cmd_rag_query)

    p = sub.add_parser("pipeline", help="transpile, execute, describe, and check a macro")
    common(p)
    p.add_argument("--dialect", choices=[d.value for d in SourceDialect], required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--book", help="seed workbook (default: blank)")
    p.add_argument("--expected", help="expected workbook to compare against")
    p.add_argument("--out", help="write the executed workbook here")
    p.add_argument("--backend-name", default="baseline")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError, ExecError, SheetDocError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
