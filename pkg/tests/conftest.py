from __future__ import annotations

import random
from pathlib import Path

import pytest

from sheetdoc.dataset import default_corpus_path, load_corpus
from sheetdoc.xwapi import (
    ActionArg,
    ActionScript,
    AtomicAction,
    CellRef,
    Formula,
    RangeRef,
    column_letters,
    seed_catalog,
)


@pytest.fixture(scope="session")
def catalog():
    return seed_catalog()


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(default_corpus_path())


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return default_corpus_path().parent


_WORDS = ["profit", "sales", "weekly", "data", "bottom", "legend", "trends",
          "customers", "seattle", "north", "total", 'quo"ted', "back\\slash",
          "two words", "sheet"]
_SHEETS = ["Sheet1", "Sheet2", "Data", "Weekly Data", None]


def _random_range(rng: random.Random) -> RangeRef:
    col = rng.randint(1, 30)
    row = rng.randint(1, 200)
    sheet = rng.choice(_SHEETS)
    if rng.random() < 0.5:
        return RangeRef.cell(col, row, sheet)
    end = CellRef(col + rng.randint(0, 5), row + rng.randint(0, 10))
    return RangeRef(CellRef(col, row), end, sheet)


def _random_formula(rng: random.Random) -> Formula:
    a = f"{column_letters(rng.randint(1, 8))}{rng.randint(1, 40)}"
    b = f"{column_letters(rng.randint(1, 8))}{rng.randint(1, 40)}"
    op = rng.choice(["+", "-", "*", "/"])
    if rng.random() < 0.3:
        return Formula(f"=SUM({a}:{b})")
    return Formula(f"={a}{op}{b}")


def _random_value(rng: random.Random, type_name: str):
    if type_name == "range":
        return _random_range(rng)
    if type_name == "number":
        if rng.random() < 0.5:
            return rng.randint(-100, 5000)
        return round(rng.uniform(-10, 5000), 4)
    if type_name == "any":
        pick = rng.random()
        if pick < 0.4:
            return rng.choice(_WORDS)
        if pick < 0.7:
            return _random_formula(rng)
        return rng.randint(0, 999)
    return rng.choice(_WORDS)


def random_script(rng: random.Random, catalog) -> ActionScript:
    """Random catalog-conformant script (plus the odd unknown action) with a
    random step grouping; used for round-trip properties."""
    entries = list(catalog)
    steps = []
    for _ in range(rng.randint(1, 8)):
        if rng.random() < 0.1:
            steps.append(AtomicAction(
                "Frobnicate" + str(rng.randint(0, 9)),
                (ActionArg("x", rng.randint(0, 99)),
                 ActionArg("note", rng.choice(_WORDS))),
                unknown=True,
            ))
            continue
        entry = rng.choice(entries)
        args = tuple(ActionArg(spec.key, _random_value(rng, spec.type))
                     for spec in entry.args)
        steps.append(AtomicAction(entry.name, args))
    groups: list[tuple[int, ...]] = []
    index = 0
    while index < len(steps):
        size = min(rng.randint(1, 3), len(steps) - index)
        groups.append(tuple(range(index, index + size)))
        index += size
    return ActionScript(tuple(steps), tuple(groups))
