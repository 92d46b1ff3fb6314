"""Candidate validation.

Question paraphrases are screened with retention heuristics targeting
the four recurring generation error classes: changed meaning, prompt
mismatch, missing information, and hallucination. Header and content
candidates get structural checks; content validation applies the edit
and inspects the resulting table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..data import QAExample, Table, validate_table
from ..metrics import normalize_answer
from ..retrieval import NoInsertableColumn, add_columns
from ..rta import _consistent_delimiter, DEFAULT_DELIMITERS, mask_column
from .parse import (Candidate, ColumnAdd, ColumnExtension, ColumnMask,
                    HeaderRename, Paraphrase)
from .pools import ParaphraseCategory

REASON_UNCHANGED = "unchanged"
REASON_CHANGED_MEANING = "changed meaning"
REASON_INFORMATION_MISSING = "information missing"
REASON_HALLUCINATION = "hallucination"
REASON_PROMPT_MISMATCH = "prompt mismatch"


@dataclass(frozen=True)
class ValidationResult:
    accepted: bool
    reason: str | None = None
    post: QAExample | None = None


def accept(post: QAExample) -> ValidationResult:
    return ValidationResult(accepted=True, post=post)


def reject(reason: str) -> ValidationResult:
    return ValidationResult(accepted=False, reason=reason)


def validate_candidate(type_or_category: "str | ParaphraseCategory",
                       original: QAExample,
                       candidate: Candidate,
                       candidate_tables: "list[Table] | None" = None,
                       seed: int = 0) -> ValidationResult:
    """Accept or reject one parsed candidate against its source example.

    On acceptance, ``post`` carries the perturbed example ready to pair
    with the original.
    """
    if isinstance(candidate, Paraphrase):
        category = type_or_category if isinstance(type_or_category, ParaphraseCategory) \
            else None
        return _validate_paraphrase(original, candidate.text, category)
    if isinstance(candidate, HeaderRename):
        return _validate_header(original, candidate)
    if isinstance(candidate, ColumnExtension):
        return _validate_extension(original, candidate)
    if isinstance(candidate, ColumnMask):
        return _validate_mask(original, candidate)
    if isinstance(candidate, ColumnAdd):
        return _validate_add(original, candidate, candidate_tables or [], seed)
    raise TypeError(f"unknown candidate kind {type(candidate).__name__}")


# --- question paraphrases ----------------------------------------------------

_NUMBER = re.compile(r"\d[\d,.]*\d|\d")
# the single-quote branch demands non-word context so apostrophes in
# words (Don't, Australia's) are not read as quotes
_QUOTED = re.compile(
    r"[\"“]([^\"“”]+)[\"”]|(?<![\w])'([^']+)'(?![\w])"
)
_WORD = re.compile(r"[A-Za-z][\w'-]*")

# carrier/indicator phrases used for category-specific mismatch checks
_REASONING_CARRIERS = (
    "how many", "how much", "how often", "how long",
    "what is the number of", "what is the total", "what is the quantity of",
)
_REASONING_WORDS = frozenset(
    "first last earliest latest most least highest lowest best worst "
    "top bottom maximum minimum more fewer longest shortest largest smallest".split()
)
_HEADER_CARRIERS = (
    "what are the names of", "what is the name of", "who", "which",
)
_INTERROGATIVES = frozenset("what when who which where how why list please".split())


def _norm_text(text: str) -> str:
    return " ".join(text.lower().split())


def _numbers(text: str) -> set[str]:
    return {m.group().replace(",", "").rstrip(".") for m in _NUMBER.finditer(text)}


def _quoted(text: str) -> set[str]:
    out = set()
    for match in _QUOTED.finditer(text):
        value = match.group(1) or match.group(2)
        if value and value.strip():
            out.add(_norm_text(value))
    return out


def _capitalized_tokens(text: str) -> set[str]:
    """Capitalized words, excluding the sentence-initial token."""
    words = _WORD.findall(text)
    return {w.lower() for w in words[1:] if w[:1].isupper()}


def _strip_possessive(word: str) -> str:
    return word[:-2] if word.lower().endswith("'s") else word


def _capitalized_runs(text: str) -> set[str]:
    """Maximal space-separated runs of >= 2 capitalized words (candidate
    multiword entities). Runs exclude the sentence-initial word and
    break on any intervening punctuation (quotes, commas, ...), so
    adjacent but distinct entities do not merge."""
    matches = list(_WORD.finditer(text))
    runs = []
    current: list[str] = []
    prev_end = None
    for i, match in enumerate(matches):
        word = match.group()
        gap_is_space = prev_end is not None and text[prev_end:match.start()].isspace()
        if word[:1].isupper() and i != 0:
            if current and not gap_is_space:
                if len(current) >= 2:
                    runs.append(" ".join(current))
                current = []
            current.append(_strip_possessive(word))
        else:
            if len(current) >= 2:
                runs.append(" ".join(current))
            current = []
        prev_end = match.end()
    if len(current) >= 2:
        runs.append(" ".join(current))
    return {_norm_text(r) for r in runs}


def _table_text(table: Table) -> str:
    parts = list(table.header)
    for row in table.rows:
        parts.extend(row)
    return _norm_text(" ; ".join(parts))


def _header_phrases_in(question: str, table: Table) -> set[str]:
    lowered = _norm_text(question)
    found = set()
    for name in table.header:
        phrase = _norm_text(name)
        if phrase and re.search(rf"(?<!\w){re.escape(phrase)}(?!\w)", lowered):
            found.add(phrase)
    return found


def _category_target(category: ParaphraseCategory | None, question: str,
                     table: Table) -> str | None:
    """The span the category instructs the model to rewrite, if we can
    locate one in the original question."""
    if category is None:
        return None
    lowered = _norm_text(question)
    if category.name == "Reasoning-carrier":
        for phrase in _REASONING_CARRIERS:
            if phrase in lowered:
                return phrase
    elif category.name == "Reasoning-synonym":
        for word in _WORD.findall(lowered):
            if word in _REASONING_WORDS:
                return word
    elif category.name == "Header-synonym":
        phrases = sorted(_header_phrases_in(question, table), key=len, reverse=True)
        if phrases:
            return phrases[0]
    elif category.name == "Header-carrier":
        for phrase in _HEADER_CARRIERS:
            if re.search(rf"(?<!\w){re.escape(phrase)}(?!\w)", lowered):
                return phrase
    elif category.name == "Cell-Value-synonym":
        cells = sorted(
            {_norm_text(c) for row in table.rows for c in row if len(c.strip()) >= 2},
            key=len, reverse=True,
        )
        for cell in cells:
            if re.search(rf"(?<!\w){re.escape(cell)}(?!\w)", lowered):
                return cell
    return None


def _contains(haystack: str, needle: str) -> bool:
    return re.search(rf"(?<!\w){re.escape(needle)}(?!\w)", haystack) is not None


def _validate_paraphrase(original: QAExample, paraphrase: str,
                         category: ParaphraseCategory | None) -> ValidationResult:
    text = paraphrase.strip()
    if not text:
        return reject(REASON_INFORMATION_MISSING)
    if _norm_text(text) == _norm_text(original.question):
        return reject(REASON_UNCHANGED)

    table_text = _table_text(original.table)
    para_norm = _norm_text(text)
    orig_norm = _norm_text(original.question)

    # the span the category instructs the model to rewrite is exempt
    # from retention: replacing it is exactly the point
    target = _category_target(category, original.question, original.table)

    def exempt(item: str) -> bool:
        return target is not None and _contains(target, item)

    # numbers: a dropped number with a new one in its place reads as a
    # changed constraint; a plain drop as lost information
    orig_numbers = _numbers(original.question)
    para_numbers = _numbers(text)
    table_numbers = _numbers(table_text)
    missing_numbers = {
        n for n in orig_numbers
        if n not in para_numbers and not _contains(table_text, n) and not exempt(n)
    }
    new_numbers = {
        n for n in para_numbers
        if n not in orig_numbers and n not in table_numbers
    }
    if missing_numbers and new_numbers:
        return reject(REASON_CHANGED_MEANING)
    if missing_numbers:
        return reject(REASON_INFORMATION_MISSING)
    if new_numbers:
        return reject(REASON_HALLUCINATION)

    # quoted strings must persist; new ones must come from the context
    for quoted in _quoted(original.question):
        if quoted not in para_norm and quoted not in table_text and not exempt(quoted):
            return reject(REASON_INFORMATION_MISSING)
    for quoted in _quoted(text):
        if quoted not in orig_norm and quoted not in table_text:
            return reject(REASON_HALLUCINATION)

    # capitalized entity tokens of the original must survive somewhere
    for token in _capitalized_tokens(original.question):
        if (not _contains(para_norm, token) and not _contains(table_text, token)
                and not exempt(token)):
            return reject(REASON_INFORMATION_MISSING)

    # new multiword capitalized entities must come from the context
    orig_runs = _capitalized_runs(original.question)
    for run in _capitalized_runs(text):
        if run not in orig_runs and run not in table_text:
            return reject(REASON_HALLUCINATION)

    # header mentions in the question pin the relevant column
    for phrase in _header_phrases_in(original.question, original.table):
        if not _contains(para_norm, phrase) and not exempt(phrase):
            return reject(REASON_INFORMATION_MISSING)

    # category-specific: the instructed span must actually change
    if target is not None and _contains(para_norm, target):
        return reject(REASON_PROMPT_MISMATCH)
    if category is not None and category.name == "Simplification":
        if len(_WORD.findall(text)) > len(_WORD.findall(original.question)):
            return reject(REASON_PROMPT_MISMATCH)
    if category is not None and category.name == "Interrogative Transformation":
        orig_first = (_WORD.findall(orig_norm) or [""])[0]
        para_first = (_WORD.findall(para_norm) or [""])[0]
        if orig_first in _INTERROGATIVES and orig_first == para_first:
            return reject(REASON_PROMPT_MISMATCH)

    return accept(original.replace(question=text))


# --- header candidates -------------------------------------------------------

def _validate_header(original: QAExample, candidate: HeaderRename) -> ValidationResult:
    if not candidate.rename_map:
        return reject(REASON_UNCHANGED)
    lowered = [n.lower().strip() for n in candidate.new_header]
    if len(set(lowered)) != len(lowered):
        return reject("duplicate header name")
    if any(not n for n in lowered):
        return reject("empty header name")
    table = original.table
    post_table = Table(candidate.new_header, table.rows, table.caption)
    problems = validate_table(post_table)
    if problems:
        return reject("invalid table: " + "; ".join(problems))
    return accept(original.replace(table=post_table))


# --- content candidates ------------------------------------------------------

def _find_column(table: Table, name: str) -> int | None:
    target = name.lower().strip()
    for i, header in enumerate(table.header):
        if header.lower().strip() == target:
            return i
    return None


def _answers_preserved(original: QAExample, post_table: Table) -> bool:
    """Answers that were cell values before must survive the edit."""
    pre_cells = {normalize_answer(c) for c in original.table.cells()}
    post_cells = {normalize_answer(c) for c in post_table.cells()}
    for answer in original.answers:
        key = normalize_answer(answer)
        if key in pre_cells and key not in post_cells:
            return False
    return True


def _finish_content(original: QAExample, post_table: Table) -> ValidationResult:
    problems = validate_table(post_table)
    if problems:
        return reject("invalid table: " + "; ".join(problems))
    if not _answers_preserved(original, post_table):
        return reject("answer lost")
    return accept(original.replace(table=post_table))


def _validate_extension(original: QAExample,
                        candidate: ColumnExtension) -> ValidationResult:
    index = _find_column(original.table, candidate.column)
    if index is None:
        return reject(f"unknown column {candidate.column!r}")
    cells = original.table.column(index)
    delim = _consistent_delimiter(cells, DEFAULT_DELIMITERS)
    if delim is None:
        return reject(f"column {candidate.column!r} is not splittable")
    name_a, name_b = candidate.new_names
    header = list(original.table.header)
    header[index:index + 1] = [name_a, name_b]
    if len({h.lower().strip() for h in header}) != len(header):
        return reject("duplicate header name")
    rows = []
    for row in original.table.rows:
        cell = row[index]
        if cell.strip():
            left, right = (part.strip() for part in cell.split(delim))
        else:
            left, right = "", ""
        new_row = list(row)
        new_row[index:index + 1] = [left, right]
        rows.append(tuple(new_row))
    return _finish_content(original, Table(header, rows, original.table.caption))


def _validate_mask(original: QAExample, candidate: ColumnMask) -> ValidationResult:
    index = _find_column(original.table, candidate.column)
    if index is None:
        return reject(f"unknown column {candidate.column!r}")
    if original.table.width < 2:
        return reject("cannot mask the last remaining column")
    return _finish_content(original, mask_column(original.table, index))


def _validate_add(original: QAExample, candidate: ColumnAdd,
                  candidate_tables: list[Table], seed: int) -> ValidationResult:
    wanted = {c.lower().strip() for c in candidate.columns}
    sources = []
    for table in candidate_tables:
        for i, name in enumerate(table.header):
            if name.lower().strip() in wanted:
                sources.append(Table([name], [(c,) for c in table.column(i)]))
                wanted.discard(name.lower().strip())
    if wanted:
        return reject(f"column(s) not in candidate tables: {sorted(wanted)}")
    try:
        post_table, _ = add_columns(original.table, sources,
                                    n=min(2, len(candidate.columns)), seed=seed)
    except NoInsertableColumn as err:
        return reject(str(err))
    return _finish_content(original, post_table)
