import os
import random

import pytest

from tableshake.data import QAExample, Table

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
GOLDENS = os.path.join(os.path.dirname(__file__), "goldens")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def golden_path(name: str) -> str:
    return os.path.join(GOLDENS, name)


def read_golden(name: str) -> str:
    with open(golden_path(name), "r", encoding="utf-8") as handle:
        return handle.read()


_WORDS = (
    "year champion score venue points team player nation rank total goals "
    "wins season result date city games medals votes name"
).split()


def random_table(rng: random.Random, max_cols: int = 5, max_rows: int = 6) -> Table:
    width = rng.randint(1, max_cols)
    names = rng.sample(_WORDS, width)
    header = [w.capitalize() for w in names]
    n_rows = rng.randint(0, max_rows)
    rows = [
        [f"{names[c]}{r}-{rng.randint(0, 99)}" for c in range(width)]
        for r in range(n_rows)
    ]
    return Table(header, rows)


def random_example(rng: random.Random, index: int = 0, **kwargs) -> QAExample:
    table = random_table(rng, **kwargs)
    question = " ".join(rng.sample(_WORDS, rng.randint(3, 6))) + "?"
    answers = [f"ans-{rng.randint(0, 999)}" for _ in range(rng.randint(1, 2))]
    return QAExample(id=f"ex{index}", table=table, question=question,
                     answers=answers)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240 + 7)


@pytest.fixture
def small_table() -> Table:
    return Table(
        ["Year", "Champion", "Runner-up"],
        [["2001", "Alice", "Bob"], ["2002", "Carol", "Dan"], ["2003", "Eve", "Frank"]],
    )


@pytest.fixture
def small_example(small_table) -> QAExample:
    return QAExample(id="x1", table=small_table,
                     question="who was the champion in 2002?",
                     answers=["Carol"])
