"""Aggregate per-instance scores into mean/MOE tables and pairwise t-tests.

Means are plain arithmetic means; the margin of error is z * s / sqrt(N)
with s the sample (N-1) standard deviation and z = 1.959964 for a 95% CI.
The t statistic uses the unequal-variance (Welch) form, and p-values come
from the normal CDF, p = 2 * (1 - Phi(|t|)), not a Student-t distribution;
with N around 100 the difference is negligible, and report footnotes say
so. Rendered values round to 3 decimals.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

from .errors import (
    DegenerateVarianceError,
    EmptyInputError,
    InsufficientDataError,
    ShapeError,
)

Z_95 = 1.959964

_METRIC_ORDER = ("bleu", "gleu", "rouge_l", "meteor")


@dataclass(frozen=True)
class Sample:
    values: tuple[float, ...]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise EmptyInputError(f"sample {self.label!r} is empty")


def mean(sample: Sample) -> float:
    return math.fsum(sample.values) / len(sample.values)


def _sample_variance(sample: Sample) -> float:
    n = len(sample.values)
    center = mean(sample)
    return math.fsum((v - center) ** 2 for v in sample.values) / (n - 1)


def margin_of_error(sample: Sample, z: float = Z_95) -> float:
    """Half-width of the confidence interval: z * s / sqrt(N)."""
    n = len(sample.values)
    if n < 2:
        raise InsufficientDataError("margin of error needs at least 2 values")
    return z * math.sqrt(_sample_variance(sample)) / math.sqrt(n)


def t_statistic(a: Sample, b: Sample) -> float:
    """Welch two-sample t: (mean_a - mean_b) / sqrt(s_a^2/N_a + s_b^2/N_b)."""
    if len(a.values) < 2 or len(b.values) < 2:
        raise InsufficientDataError("t statistic needs at least 2 values per sample")
    var_a = _sample_variance(a)
    var_b = _sample_variance(b)
    if var_a == 0 and var_b == 0:
        raise DegenerateVarianceError(
            f"both samples have zero variance ({a.label!r}, {b.label!r})")
    return (mean(a) - mean(b)) / math.sqrt(var_a / len(a.values) + var_b / len(b.values))


def p_value(t: float) -> float:
    """Two-tailed p under a standard normal: 2 * (1 - Phi(|t|))."""
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    phi = 0.5 * (1.0 + math.erf(abs(t) / math.sqrt(2.0)))
    return 2.0 * (1.0 - phi)


@dataclass(frozen=True)
class PairRow:
    model_a: str
    model_b: str
    metric: str
    t: float
    p: float
    significant: bool
    ci_overlap: bool


@dataclass
class StatsReport:
    models: list[str]
    metrics: list[str]
    cells: dict[tuple[str, str], tuple[float, float]]  # (model, metric) -> (mean, moe)
    pairs: list[PairRow] = field(default_factory=list)
    footnotes: list[str] = field(default_factory=list)


def _metric_sort_key(name: str):
    try:
        return (0, _METRIC_ORDER.index(name))
    except ValueError:
        return (1, name)


def build_report(samples: dict[tuple[str, str], Sample],
                 pair_models: list[str] | None = None,
                 alpha: float = 0.05) -> StatsReport:
    """Build the mean±MOE table plus pairwise (t, p) rows.

    samples maps (model, metric) to a Sample; all samples of one metric
    must share N (ShapeError otherwise). Pairwise rows cover every pair of
    pair_models (default: all models); a pair is flagged ci_overlap when
    |mean_a - mean_b| < moe_a + moe_b.
    """
    models = sorted({model for model, _ in samples})
    metrics = sorted({metric for _, metric in samples}, key=_metric_sort_key)
    for metric in metrics:
        sizes = {len(samples[(m, metric)].values) for m in models if (m, metric) in samples}
        if len(sizes) > 1:
            raise ShapeError(f"samples for metric {metric!r} disagree on N: {sorted(sizes)}")

    cells: dict[tuple[str, str], tuple[float, float]] = {}
    for (model, metric), sample in samples.items():
        cells[(model, metric)] = (mean(sample), margin_of_error(sample))

    subset = sorted(pair_models) if pair_models is not None else models
    missing = [m for m in subset if m not in models]
    if missing:
        raise ShapeError(f"pair models not present in samples: {missing}")

    pairs: list[PairRow] = []
    for model_a, model_b in itertools.combinations(subset, 2):
        for metric in metrics:
            key_a, key_b = (model_a, metric), (model_b, metric)
            if key_a not in samples or key_b not in samples:
                continue
            t = t_statistic(samples[key_a], samples[key_b])
            p = p_value(t)
            mean_a, moe_a = cells[key_a]
            mean_b, moe_b = cells[key_b]
            pairs.append(PairRow(
                model_a, model_b, metric, t, p,
                significant=p < alpha,
                ci_overlap=abs(mean_a - mean_b) < moe_a + moe_b,
            ))
    return StatsReport(
        models=models,
        metrics=metrics,
        cells=cells,
        pairs=pairs,
        footnotes=[
            "MOE is the 95% CI half-width, z * s / sqrt(N) with z = 1.959964.",
            "p-values use the normal CDF, 2*(1-Phi(|t|)), not a Student-t distribution.",
            "Pairs whose mean difference is smaller than the sum of their MOEs are "
            "flagged 'overlap' and are not comparable on point estimates alone.",
        ],
    )


def render_markdown(report: StatsReport, header_lines: list[str] | None = None) -> str:
    """Deterministic Markdown rendering, 3-decimal display precision."""
    lines: list[str] = []
    for line in header_lines or []:
        lines.append(f"> {line}")
    if header_lines:
        lines.append("")
    lines.append("| model | " + " | ".join(report.metrics) + " |")
    lines.append("|---" * (len(report.metrics) + 1) + "|")
    for model in report.models:
        row = [model]
        for metric in report.metrics:
            cell = report.cells.get((model, metric))
            row.append("-" if cell is None else f"{cell[0]:.3f} ± {cell[1]:.3f}")
        lines.append("| " + " | ".join(row) + " |")
    if report.pairs:
        lines.append("")
        lines.append("| pair | metric | t | p | significant | CI overlap |")
        lines.append("|---|---|---|---|---|---|")
        for pair in report.pairs:
            lines.append(
                f"| {pair.model_a} vs {pair.model_b} | {pair.metric} "
                f"| {pair.t:.3f} | {pair.p:.3f} "
                f"| {'yes' if pair.significant else 'no'} "
                f"| {'overlap' if pair.ci_overlap else 'disjoint'} |")
    if report.footnotes:
        lines.append("")
        for note in report.footnotes:
            lines.append(f"*{note}*")
    return "\n".join(lines) + "\n"


def report_json(report: StatsReport) -> str:
    doc = {
        "models": [
            {"name": model,
             "metrics": {
                 metric: {"mean": round(report.cells[(model, metric)][0], 3),
                          "moe": round(report.cells[(model, metric)][1], 3)}
                 for metric in report.metrics if (model, metric) in report.cells
             }}
            for model in report.models
        ],
        "pairs": [
            {"a": pair.model_a, "b": pair.model_b, "metric": pair.metric,
             "t": round(pair.t, 3), "p": round(pair.p, 3),
             "significant": pair.significant, "ci_overlap": pair.ci_overlap}
            for pair in report.pairs
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
