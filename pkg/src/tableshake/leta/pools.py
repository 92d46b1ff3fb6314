"""Demonstration pools for the prompt builders.

Pools ship as an editable JSON resource and are validated on load:
header types need at least 10 demonstrations, content types at least 8,
and each question-paraphrase category between 5 and 8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources as importlib_resources
from typing import Any

from ..data import Table, table_from_obj

HEADER_MIN_DEMOS = 10
CONTENT_MIN_DEMOS = 8
NLQ_MIN_DEMOS = 5
NLQ_MAX_DEMOS = 8

HEADER_TYPES = ("header_synonym", "header_abbrev")
CONTENT_TYPES = ("col_extension", "col_masking", "col_adding")


class PoolError(ValueError):
    pass


@dataclass(frozen=True)
class ParaphraseCategory:
    """One question-paraphrase family, at word or sentence level."""

    level: str  # "word" | "sentence"
    name: str

    def __post_init__(self):
        valid = WORD_CATEGORY_NAMES if self.level == "word" else SENTENCE_CATEGORY_NAMES
        if self.level not in ("word", "sentence"):
            raise PoolError(f"unknown category level {self.level!r}")
        if self.name not in valid:
            raise PoolError(f"{self.name!r} is not a {self.level}-level category")

    @property
    def perturbation_type(self) -> str:
        return "nlq_word" if self.level == "word" else "nlq_sentence"


WORD_CATEGORY_NAMES = (
    "Reasoning-synonym",
    "Reasoning-carrier",
    "Header-synonym",
    "Header-carrier",
    "Cell-Value-synonym",
)
SENTENCE_CATEGORY_NAMES = (
    "Simplification",
    "Interrogative Transformation",
    "General",
)

WORD_CATEGORIES = tuple(ParaphraseCategory("word", n) for n in WORD_CATEGORY_NAMES)
SENTENCE_CATEGORIES = tuple(ParaphraseCategory("sentence", n) for n in SENTENCE_CATEGORY_NAMES)
ALL_CATEGORIES = WORD_CATEGORIES + SENTENCE_CATEGORIES


def category_by_name(name: str) -> ParaphraseCategory:
    for cat in ALL_CATEGORIES:
        if cat.name.lower() == name.lower():
            return cat
    raise PoolError(f"unknown paraphrase category {name!r}")


@dataclass(frozen=True)
class HeaderDemo:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]  # exactly the first two rows
    output: tuple[str, ...]


@dataclass(frozen=True)
class ExtensionDemo:
    table: Table
    column: str
    new_names: tuple[str, str]
    explanation: str


@dataclass(frozen=True)
class MaskDemo:
    table: Table
    column: str
    explanation: str


@dataclass(frozen=True)
class AddDemo:
    table: Table
    candidate: Table
    columns: tuple[str, ...]
    explanation: str


@dataclass(frozen=True)
class NlqDemo:
    question: str
    paraphrase: str
    explanation: str


@dataclass(frozen=True)
class DemonstrationPool:
    header_synonym: tuple[HeaderDemo, ...]
    header_abbrev: tuple[HeaderDemo, ...]
    col_extension: tuple[ExtensionDemo, ...]
    col_masking: tuple[MaskDemo, ...]
    col_adding: tuple[AddDemo, ...]
    nlq: dict[str, tuple[NlqDemo, ...]]  # keyed by category name

    def __post_init__(self):
        for name in HEADER_TYPES:
            if len(getattr(self, name)) < HEADER_MIN_DEMOS:
                raise PoolError(f"{name} pool needs >= {HEADER_MIN_DEMOS} demos")
        for name in CONTENT_TYPES:
            if len(getattr(self, name)) < CONTENT_MIN_DEMOS:
                raise PoolError(f"{name} pool needs >= {CONTENT_MIN_DEMOS} demos")
        for cat in ALL_CATEGORIES:
            demos = self.nlq.get(cat.name, ())
            if not NLQ_MIN_DEMOS <= len(demos) <= NLQ_MAX_DEMOS:
                raise PoolError(
                    f"category {cat.name!r} needs {NLQ_MIN_DEMOS}-{NLQ_MAX_DEMOS}"
                    f" demos, has {len(demos)}"
                )

    def demos_for(self, type_or_category: "str | ParaphraseCategory"):
        if isinstance(type_or_category, ParaphraseCategory):
            return self.nlq[type_or_category.name]
        if type_or_category in HEADER_TYPES + CONTENT_TYPES:
            return getattr(self, type_or_category)
        raise PoolError(f"no demonstration pool for {type_or_category!r}")


def _header_demo(obj: dict) -> HeaderDemo:
    rows = tuple(tuple(r) for r in obj["rows"])
    if len(rows) != 2:
        raise PoolError("header demos carry exactly the first two rows")
    demo = HeaderDemo(header=tuple(obj["header"]), rows=rows,
                      output=tuple(obj["output"]))
    if len(demo.output) != len(demo.header):
        raise PoolError(f"demo output width differs for header {demo.header}")
    return demo


def pool_from_obj(obj: dict[str, Any]) -> DemonstrationPool:
    try:
        return DemonstrationPool(
            header_synonym=tuple(_header_demo(d) for d in obj["header_synonym"]),
            header_abbrev=tuple(_header_demo(d) for d in obj["header_abbrev"]),
            col_extension=tuple(
                ExtensionDemo(
                    table=table_from_obj(d["table"]),
                    column=d["column"],
                    new_names=(d["new_names"][0], d["new_names"][1]),
                    explanation=d["explanation"],
                )
                for d in obj["col_extension"]
            ),
            col_masking=tuple(
                MaskDemo(table=table_from_obj(d["table"]), column=d["column"],
                         explanation=d["explanation"])
                for d in obj["col_masking"]
            ),
            col_adding=tuple(
                AddDemo(
                    table=table_from_obj(d["table"]),
                    candidate=table_from_obj(d["candidate"]),
                    columns=tuple(d["columns"]),
                    explanation=d["explanation"],
                )
                for d in obj["col_adding"]
            ),
            nlq={
                name: tuple(
                    NlqDemo(question=d["question"], paraphrase=d["paraphrase"],
                            explanation=d["explanation"])
                    for d in demos
                )
                for name, demos in obj["nlq"].items()
            },
        )
    except (KeyError, IndexError, TypeError) as err:
        raise PoolError(f"malformed pool record: {err!r}") from None


def load_pool(path: str) -> DemonstrationPool:
    with open(path, "r", encoding="utf-8") as handle:
        return pool_from_obj(json.load(handle))


def default_pool() -> DemonstrationPool:
    """The pool bundled with the package."""
    text = (importlib_resources.files("tableshake.resources")
            .joinpath("demo_pools.json").read_text(encoding="utf-8"))
    return pool_from_obj(json.loads(text))
