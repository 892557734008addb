"""Text-similarity metrics over step lists, plus execution-rate scores.

Tokenization is normative for every metric: lowercase, split on Unicode
whitespace, detach leading and trailing punctuation as separate tokens,
but keep formula-shaped tokens (leading '=') intact. Candidate and
reference step lists are joined with single spaces into one sequence per
side before scoring, so each instance gets exactly one score per metric.

BLEU uses floor smoothing: a zero n-gram precision is replaced by
1 / (2 * candidate n-gram count at that order). METEOR matches exact
tokens first and Porter stems second (no synonym stage), with the standard
parameters alpha=0.9, beta=3, gamma=0.5.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass

from ._porter import stem
from .errors import EmptyInputError

TokenSeq = list[str]

_PUNCT = frozenset(string.punctuation)

METRIC_NAMES = ("bleu", "gleu", "rouge_l", "meteor")


def _explode(token: str) -> list[str]:
    if token.startswith("="):
        return [token]
    lead: list[str] = []
    while token and token[0] in _PUNCT:
        lead.append(token[0])
        token = token[1:]
        if token.startswith("="):
            return lead + [token]
    trail: list[str] = []
    while token and token[-1] in _PUNCT:
        trail.append(token[-1])
        token = token[:-1]
    trail.reverse()
    middle = [token] if token else []
    return lead + middle + trail


def tokenize(text: str) -> TokenSeq:
    """Produce the normative token sequence for a piece of text."""
    tokens: list[str] = []
    for raw in text.lower().split():
        tokens.extend(_explode(raw))
    return tokens


def _require(candidate: TokenSeq, references: list[TokenSeq]) -> None:
    if not candidate:
        raise EmptyInputError("candidate is empty")
    if not references or any(not ref for ref in references):
        raise EmptyInputError("reference is empty")


def _ngrams(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: TokenSeq, references: list[TokenSeq], max_n: int = 4) -> float:
    """Smoothed sentence BLEU: geometric mean of modified n-gram precisions
    times the brevity penalty exp(1 - r/c) when the candidate is short."""
    _require(candidate, references)
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = _ngrams(candidate, n)
        total = sum(cand_counts.values())
        best: Counter = Counter()
        for ref in references:
            for gram, count in _ngrams(ref, n).items():
                if count > best[gram]:
                    best[gram] = count
        matches = sum(min(count, best[gram]) for gram, count in cand_counts.items())
        if matches == 0:
            precision = 1.0 / (2 * max(total, 1))
        else:
            precision = matches / total
        log_sum += math.log(precision)
    geo_mean = math.exp(log_sum / max_n)
    cand_len = len(candidate)
    ref_len = min((abs(len(ref) - cand_len), len(ref)) for ref in references)[1]
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * geo_mean


def gleu(candidate: TokenSeq, references: list[TokenSeq], max_n: int = 4) -> float:
    """Sentence GLEU: min(precision, recall) over pooled 1..max_n n-gram
    matches, against the best-scoring reference."""
    _require(candidate, references)
    best_score = 0.0
    for ref in references:
        matches = 0
        cand_total = 0
        ref_total = 0
        for n in range(1, max_n + 1):
            cand_counts = _ngrams(candidate, n)
            ref_counts = _ngrams(ref, n)
            matches += sum(min(count, ref_counts[gram])
                           for gram, count in cand_counts.items())
            cand_total += sum(cand_counts.values())
            ref_total += sum(ref_counts.values())
        if cand_total == 0 or ref_total == 0:
            continue
        score = min(matches / cand_total, matches / ref_total)
        best_score = max(best_score, score)
    return best_score


def _lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    previous = [0] * (len(b) + 1)
    for tok_a in a:
        current = [0]
        for j, tok_b in enumerate(b):
            if tok_a == tok_b:
                current.append(previous[j] + 1)
            else:
                current.append(max(current[j], previous[j + 1]))
        previous = current
    return previous[len(b)]


def rouge_l(candidate: TokenSeq, reference: TokenSeq) -> float:
    """LCS F-measure with beta=1: F = 2PR / (P + R), zero when LCS is zero."""
    _require(candidate, [reference])
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2 * precision * recall / (precision + recall)


def _align(candidate: TokenSeq, reference: TokenSeq) -> list[tuple[int, int]]:
    """Two-stage leftmost alignment: exact matches, then Porter-stem matches."""
    pairs: list[tuple[int, int]] = []
    taken: set[int] = set()
    for i, token in enumerate(candidate):
        for j, ref_token in enumerate(reference):
            if j not in taken and ref_token == token:
                pairs.append((i, j))
                taken.add(j)
                break
    matched = {i for i, _ in pairs}
    cand_stems = [stem(t) for t in candidate]
    ref_stems = [stem(t) for t in reference]
    for i, cand_stem in enumerate(cand_stems):
        if i in matched:
            continue
        for j, ref_stem in enumerate(ref_stems):
            if j not in taken and ref_stem == cand_stem:
                pairs.append((i, j))
                taken.add(j)
                matched.add(i)
                break
    pairs.sort()
    return pairs


def _chunk_count(pairs: list[tuple[int, int]]) -> int:
    chunks = 0
    previous: tuple[int, int] | None = None
    for i, j in pairs:
        if previous is None or i != previous[0] + 1 or j != previous[1] + 1:
            chunks += 1
        previous = (i, j)
    return chunks


def meteor(candidate: TokenSeq, reference: TokenSeq,
           alpha: float = 0.9, beta: float = 3.0, gamma: float = 0.5) -> float:
    """Unigram alignment score with a fragmentation penalty.

    F_mean = PR / (alpha*P + (1-alpha)*R); penalty = gamma*(chunks/m)^beta;
    score = F_mean * (1 - penalty); zero when nothing matches.
    """
    _require(candidate, [reference])
    pairs = _align(candidate, reference)
    matched = len(pairs)
    if matched == 0:
        return 0.0
    precision = matched / len(candidate)
    recall = matched / len(reference)
    f_mean = precision * recall / (alpha * precision + (1 - alpha) * recall)
    penalty = gamma * (_chunk_count(pairs) / matched) ** beta
    return f_mean * (1 - penalty)


@dataclass(frozen=True)
class MetricScore:
    bleu: float
    gleu: float
    rouge_l: float
    meteor: float

    def as_dict(self) -> dict[str, float]:
        return {"bleu": self.bleu, "gleu": self.gleu,
                "rouge_l": self.rouge_l, "meteor": self.meteor}


def score_instance(candidate_steps: list[str], reference_steps: list[str]) -> MetricScore:
    """Score one instance: steps are joined with single spaces per side."""
    candidate = tokenize(" ".join(candidate_steps))
    reference = tokenize(" ".join(reference_steps))
    _require(candidate, [reference])
    return MetricScore(
        bleu=bleu(candidate, [reference]),
        gleu=gleu(candidate, [reference]),
        rouge_l=rouge_l(candidate, reference),
        meteor=meteor(candidate, reference),
    )


@dataclass(frozen=True)
class RateScore:
    total: int
    exec_count: int
    pass_count: int

    def __post_init__(self) -> None:
        if not 0 <= self.pass_count <= self.exec_count <= self.total:
            raise ValueError(
                f"rate counts must satisfy 0 <= pass <= exec <= total, got {self}")


def rates(score: RateScore) -> tuple[float, float]:
    """(exec@1, pass@1) fractions; raises ZeroDivisionError when total is 0."""
    return score.exec_count / score.total, score.pass_count / score.total
