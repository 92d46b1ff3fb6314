"""Prompt construction for every generation type.

Rendering is a pure function of (type, pool, target, seed): demo
selection is seeded, formatting is fixed, and the result is stable
enough to pin with golden files. Each template ends with an answer
anchor ("New header:", "Paraphrase:", ...) that the parser keys on.

The instruction texts are hand-written defaults; edit the constants to
retune them.
"""

from __future__ import annotations

from ..data import QAExample, Table
from ..rng import SplitMix64, fisher_yates
from .pools import (CONTENT_TYPES, HEADER_TYPES, DemonstrationPool,
                    ParaphraseCategory)

LETA_TYPES = HEADER_TYPES + CONTENT_TYPES

HEADER_SLOTS = 10
CONTENT_SLOTS = 8

ANCHORS = {
    "header_synonym": "New header:",
    "header_abbrev": "New header:",
    "col_extension": "Extended column:",
    "col_masking": "Masked column:",
    "col_adding": "Added column:",
    "nlq": "Paraphrase:",
}

INSTRUCTIONS = {
    "header_synonym": (
        "Rename one or more column headers of the table with synonymous names"
        " that keep the same domain meaning. Leave the remaining headers"
        " unchanged and reply with the complete header on a single line"
        " starting with \"New header:\"."
    ),
    "header_abbrev": (
        "Replace one or more column headers of the table with a common"
        " abbreviation. Leave the remaining headers unchanged and reply with"
        " the complete header on a single line starting with \"New header:\"."
    ),
    "col_extension": (
        "Pick one compound column of the table and split it into two"
        " semantically equivalent columns. Reply on a single line starting"
        " with \"Extended column:\" in the form"
        " \"<column> -> <new name 1> | <new name 2>\"."
    ),
    "col_masking": (
        "Pick one column whose content can be inferred from another column"
        " and should be removed. Reply on a single line starting with"
        " \"Masked column:\"."
    ),
    "col_adding": (
        "Select one column from the candidate table that fits the source"
        " table's domain and could be inserted into it. Reply on a single"
        " line starting with \"Added column:\"."
    ),
}

CATEGORY_INSTRUCTIONS = {
    "Reasoning-synonym": (
        "Paraphrase the question by replacing a word that signals the"
        " reasoning operation (such as first, most, or highest) with a"
        " synonym, keeping the meaning identical."
    ),
    "Reasoning-carrier": (
        "Rewrite the carrier phrase that signals the reasoning operation"
        " (such as \"how many\") without changing what the question asks."
    ),
    "Header-synonym": (
        "Paraphrase the word that points at a table column with a synonym,"
        " keeping the question's meaning identical."
    ),
    "Header-carrier": (
        "Rewrite the phrase used to identify the relevant table column,"
        " keeping the question's meaning identical."
    ),
    "Cell-Value-synonym": (
        "Paraphrase a word that refers to a cell value with an equivalent"
        " expression, keeping the question's meaning identical."
    ),
    "Simplification": (
        "Simplify the question to make it less redundant while preserving"
        " every constraint it states."
    ),
    "Interrogative Transformation": (
        "Convert the question between interrogative and imperative form"
        " while preserving its meaning."
    ),
    "General": (
        "Paraphrase the question while preserving its meaning and every"
        " constraint it states."
    ),
}


class PromptError(ValueError):
    pass


def _select(demos, slots: int, seed: int) -> list:
    """Seeded selection of ``slots`` demos. The seeded permutation also
    orders them, so every generation round renders a distinct prompt
    (and therefore a distinct fixture key) even when the pool exactly
    fills the slots."""
    perm = fisher_yates(len(demos), SplitMix64(seed))
    return [demos[i] for i in perm[:slots]]


def _table_lines(table: Table) -> list[str]:
    lines = [" | ".join(table.header)]
    lines.extend(" | ".join(row) for row in table.rows)
    return lines


def _header_block(header, rows) -> list[str]:
    lines = ["Header: " + " | ".join(header)]
    for i, row in enumerate(rows[:2], start=1):
        lines.append(f"Row {i}: " + " | ".join(row))
    return lines


def build_prompt(type_or_category: str | ParaphraseCategory,
                 pool: DemonstrationPool,
                 target: QAExample | Table,
                 seed: int = 0,
                 candidate_table: Table | None = None) -> str:
    """Render the full few-shot prompt for one generation target.

    Header types show the target header plus its first two rows;
    content types show the whole table (and the retrieved candidate
    table for column adding); question types show the original
    question.
    """
    if isinstance(type_or_category, ParaphraseCategory):
        return _build_nlq_prompt(type_or_category, pool, target, seed)
    type_name = type_or_category
    if type_name in HEADER_TYPES:
        return _build_header_prompt(type_name, pool, target, seed)
    if type_name in CONTENT_TYPES:
        return _build_content_prompt(type_name, pool, target, seed,
                                     candidate_table)
    raise PromptError(f"no prompt template for {type_name!r}")


def _target_table(target: QAExample | Table) -> Table:
    return target.table if isinstance(target, QAExample) else target


def _build_header_prompt(type_name: str, pool, target, seed: int) -> str:
    demos = _select(pool.demos_for(type_name), HEADER_SLOTS, seed)
    if len(demos) < HEADER_SLOTS:
        raise PromptError(
            f"{type_name} needs {HEADER_SLOTS} demonstrations, pool has {len(demos)}"
        )
    table = _target_table(target)
    parts = [INSTRUCTIONS[type_name], ""]
    for demo in demos:
        parts.extend(_header_block(demo.header, demo.rows))
        parts.append("New header: " + " | ".join(demo.output))
        parts.append("")
    parts.extend(_header_block(table.header, table.rows))
    parts.append("New header:")
    return "\n".join(parts)


def _build_content_prompt(type_name: str, pool, target, seed: int,
                          candidate_table: Table | None) -> str:
    demos = _select(pool.demos_for(type_name), CONTENT_SLOTS, seed)
    if len(demos) < CONTENT_SLOTS:
        raise PromptError(
            f"{type_name} needs {CONTENT_SLOTS} demonstrations, pool has {len(demos)}"
        )
    table = _target_table(target)
    parts = [INSTRUCTIONS[type_name], ""]
    for demo in demos:
        parts.append("Source table:" if type_name == "col_adding" else "Table:")
        parts.extend(_table_lines(demo.table))
        if type_name == "col_adding":
            parts.append("Candidate table:")
            parts.extend(_table_lines(demo.candidate))
            parts.append("Added column: " + " | ".join(demo.columns))
        elif type_name == "col_extension":
            parts.append(
                f"Extended column: {demo.column} -> " + " | ".join(demo.new_names)
            )
        else:
            parts.append(f"Masked column: {demo.column}")
        parts.append("Explanation: " + demo.explanation)
        parts.append("")
    if type_name == "col_adding":
        if candidate_table is None:
            raise PromptError("col_adding prompts need a candidate table")
        parts.append("Source table:")
        parts.extend(_table_lines(table))
        parts.append("Candidate table:")
        parts.extend(_table_lines(candidate_table))
        parts.append("Added column:")
    else:
        parts.append("Table:")
        parts.extend(_table_lines(table))
        parts.append(ANCHORS[type_name])
    return "\n".join(parts)


def _build_nlq_prompt(category: ParaphraseCategory, pool, target, seed: int) -> str:
    if not isinstance(target, QAExample):
        raise PromptError("question paraphrasing needs a QAExample target")
    demos = _select(pool.demos_for(category), len(pool.demos_for(category)), seed)
    parts = [CATEGORY_INSTRUCTIONS[category.name], ""]
    for demo in demos:
        parts.append("Question: " + demo.question)
        parts.append("Paraphrase: " + demo.paraphrase)
        parts.append("Explanation: " + demo.explanation)
        parts.append("")
    parts.append("Question: " + target.question)
    parts.append("Paraphrase:")
    return "\n".join(parts)
