"""Independent brute-force oracles.

These deliberately avoid the library's code paths: they build n-gram count
tables with explicit scans, enumerate subsequences outright, and count
matches with index lists, so agreement with the fast implementations is
meaningful.
"""

from __future__ import annotations

import itertools
import math
import re

from sheetdoc._porter import stem


def ngram_table(tokens: list[str], n: int) -> dict[tuple[str, ...], int]:
    table: dict[tuple[str, ...], int] = {}
    i = 0
    while i + n <= len(tokens):
        gram = tuple(tokens[i:i + n])
        table[gram] = table.get(gram, 0) + 1
        i += 1
    return table


def bleu_oracle(candidate: list[str], references: list[list[str]], max_n: int = 4) -> float:
    precisions = []
    for n in range(1, max_n + 1):
        cand_table = ngram_table(candidate, n)
        total = sum(cand_table.values())
        clipped = 0
        for gram, count in cand_table.items():
            best = 0
            for ref in references:
                seen = 0
                j = 0
                while j + n <= len(ref):
                    if tuple(ref[j:j + n]) == gram:
                        seen += 1
                    j += 1
                if seen > best:
                    best = seen
            clipped += min(count, best)
        if clipped == 0:
            precisions.append(1.0 / (2 * max(total, 1)))
        else:
            precisions.append(clipped / total)
    product = 1.0
    for p in precisions:
        product *= p
    geo = product ** (1.0 / max_n)
    c_len = len(candidate)
    r_len = sorted((abs(len(r) - c_len), len(r)) for r in references)[0][1]
    brevity = 1.0 if c_len >= r_len else math.exp(1.0 - r_len / c_len)
    return brevity * geo


def gleu_oracle(candidate: list[str], references: list[list[str]], max_n: int = 4) -> float:
    best = 0.0
    for ref in references:
        matches = 0
        cand_total = 0
        ref_total = 0
        for n in range(1, max_n + 1):
            cand_table = ngram_table(candidate, n)
            ref_table = ngram_table(ref, n)
            for gram, count in cand_table.items():
                matches += min(count, ref_table.get(gram, 0))
            cand_total += sum(cand_table.values())
            ref_total += sum(ref_table.values())
        if cand_total and ref_total:
            best = max(best, min(matches / cand_total, matches / ref_total))
    return best


def lcs_bruteforce(a: list[str], b: list[str]) -> int:
    """Longest common subsequence by enumerating subsequences of the shorter
    side; only viable for short sequences."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    best = 0
    for size in range(len(short), 0, -1):
        if size <= best:
            break
        for combo in itertools.combinations(short, size):
            it = iter(long_)
            if all(token in it for token in combo):
                best = size
                break
    return best


def rouge_l_oracle(candidate: list[str], reference: list[str]) -> float:
    lcs = lcs_bruteforce(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2 * precision * recall / (precision + recall)


def meteor_oracle(candidate: list[str], reference: list[str],
                  alpha: float = 0.9, beta: float = 3.0, gamma: float = 0.5) -> float:
    """Leftmost two-stage matching implemented with explicit index lists."""
    ref_taken = [False] * len(reference)
    pairs: list[tuple[int, int]] = []
    for i in range(len(candidate)):
        for j in range(len(reference)):
            if not ref_taken[j] and candidate[i] == reference[j]:
                ref_taken[j] = True
                pairs.append((i, j))
                break
    cand_taken = [False] * len(candidate)
    for i, _ in pairs:
        cand_taken[i] = True
    for i in range(len(candidate)):
        if cand_taken[i]:
            continue
        for j in range(len(reference)):
            if not ref_taken[j] and stem(candidate[i]) == stem(reference[j]):
                ref_taken[j] = True
                cand_taken[i] = True
                pairs.append((i, j))
                break
    pairs = sorted(pairs)
    m = len(pairs)
    if m == 0:
        return 0.0
    chunks = 1
    for prev, cur in zip(pairs, pairs[1:]):
        if cur[0] != prev[0] + 1 or cur[1] != prev[1] + 1:
            chunks += 1
    precision = m / len(candidate)
    recall = m / len(reference)
    f_mean = precision * recall / (alpha * precision + (1 - alpha) * recall)
    return f_mean * (1 - gamma * (chunks / m) ** beta)


def kahan_mean(values) -> float:
    total = 0.0
    compensation = 0.0
    for value in values:
        y = value - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
    return total / len(values)


_CELL = re.compile(r"(?<![A-Za-z0-9_$])(\$?)([A-Za-z]{1,3})(\$?)([0-9]+)")


def shift_refs_oracle(formula: str, rows: int, cols: int) -> str:
    """Regex-based reference shifting, independent of the tokenizer path.

    Only valid for formulas without string literals or sheet prefixes, which
    is what the randomized autofill cases generate.
    """
    from sheetdoc.xwapi.refs import column_index, column_letters

    def bump(match: re.Match) -> str:
        col = column_index(match.group(2)) + cols
        row = int(match.group(4)) + rows
        if col < 1 or row < 1:
            return "#REF"
        return f"{column_letters(col)}{row}"

    body = formula[1:] if formula.startswith("=") else formula
    return "=" + _CELL.sub(bump, body)
