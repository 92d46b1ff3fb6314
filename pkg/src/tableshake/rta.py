"""Rule-based adversarial generators: dictionary header renames,
abbreviation rules, compound-column splitting, inferable-column
detection, and a longest-match synonym attack on questions.

Lexicons are plain text resources (``phrase<TAB>alt1|alt2|...``, ``#``
comments) so they can be extended without touching code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .data import Table
from .rng import SplitMix64

DEFAULT_DELIMITERS = ("–", "-", "/")
HEADER_REPLACE_RATE = 0.5

# single-word lexicon entries must be content words; these never fire
STOPWORDS = frozenset(
    "a an the of in on at to for by with from as is are was were be been "
    "do does did has have had and or not no this that these those it its "
    "his her their our your my".split()
)


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class SynonymLexicon:
    """Lowercased phrase -> replacement phrases."""

    entries: dict[str, tuple[str, ...]]
    source: str = "default"

    def __post_init__(self):
        for phrase, alts in self.entries.items():
            if not alts:
                raise LexiconError(f"{phrase!r} has no replacements")
            if phrase in (a.lower() for a in alts):
                raise LexiconError(f"{phrase!r} maps to itself")

    def get(self, phrase: str) -> tuple[str, ...]:
        return self.entries.get(phrase.lower().strip(), ())

    def __len__(self) -> int:
        return len(self.entries)


def parse_lexicon(text: str, source: str = "inline") -> SynonymLexicon:
    entries: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconError(f"{source}:{lineno}: expected phrase<TAB>alternatives")
        phrase, alts = line.split("\t", 1)
        phrase = phrase.strip().lower()
        replacements = tuple(a.strip() for a in alts.split("|") if a.strip())
        if not phrase or not replacements:
            raise LexiconError(f"{source}:{lineno}: empty phrase or replacements")
        entries[phrase] = replacements
    return SynonymLexicon(entries, source=source)


def load_lexicon(path: str) -> SynonymLexicon:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_lexicon(handle.read(), source=path)


# --- header synonym replacement --------------------------------------------

def rta_header_synonym(table: Table, lexicon: SynonymLexicon, seed: int,
                       rate: float = HEADER_REPLACE_RATE) -> tuple[Table, dict[str, str]]:
    """Independently rename each header that has a lexicon entry, with
    seeded probability ``rate``. Rows are never touched."""
    rng = SplitMix64(seed)
    new_header = []
    rename_map: dict[str, str] = {}
    for name in table.header:
        alts = lexicon.get(name)
        # one RNG draw per eligible header, then one per alternative pick,
        # so the stream does not depend on row content
        if alts and rng.chance(rate):
            replacement = alts[rng.below(len(alts))]
            if name.strip()[:1].isupper():
                replacement = replacement[:1].upper() + replacement[1:]
            rename_map[name] = replacement
            new_header.append(replacement)
        else:
            new_header.append(name)
    return Table(new_header, table.rows, table.caption), rename_map


# --- header abbreviation replacement ----------------------------------------

@dataclass(frozen=True)
class AbbreviationRuleSet:
    """Ordered abbreviation rules. A header is eligible when it has at
    least ``min_length`` alphabetic characters or is multiword; the
    first applicable rule wins: exact map, initialism (multiword),
    vowel drop, truncation. Every output is strictly shorter than its
    input."""

    exact: dict[str, tuple[str, ...]] = field(default_factory=dict)
    min_length: int = 4
    truncate_to: int = 4

    def eligible(self, name: str) -> bool:
        alpha = sum(c.isalpha() for c in name)
        return alpha >= self.min_length or len(name.split()) > 1

    def apply(self, name: str, rng: SplitMix64) -> str | None:
        """Abbreviation for ``name``, or None when no rule applies."""
        if not self.eligible(name):
            return None
        alts = self.exact.get(name.lower().strip())
        if alts:
            out = alts[rng.below(len(alts))] if len(alts) > 1 else alts[0]
            if out and len(out) < len(name):
                return out
        words = name.split()
        if len(words) > 1:
            out = "".join(w[0].upper() for w in words if w)
            if out and len(out) < len(name):
                return out
        out = _drop_vowels(name)
        if out is not None and len(out) < len(name):
            return out
        if len(name) > self.truncate_to + 1:
            return name[: self.truncate_to] + "."
        return None


def _drop_vowels(word: str) -> str | None:
    """Keep the first letter, drop later vowels: Points -> Pnts."""
    if not word:
        return None
    rest = "".join(c for c in word[1:] if c.lower() not in "aeiou")
    out = word[0] + rest
    return out if len(out) < len(word) else None


def parse_abbreviations(text: str, source: str = "inline") -> AbbreviationRuleSet:
    lexicon = parse_lexicon(text, source=source)
    for phrase, alts in lexicon.entries.items():
        for alt in alts:
            if len(alt) >= len(phrase):
                raise LexiconError(
                    f"{source}: abbreviation {alt!r} not shorter than {phrase!r}"
                )
    return AbbreviationRuleSet(exact=dict(lexicon.entries))


def load_abbreviations(path: str) -> AbbreviationRuleSet:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_abbreviations(handle.read(), source=path)


def rta_header_abbreviation(table: Table, rules: AbbreviationRuleSet,
                            seed: int) -> tuple[Table, dict[str, str]]:
    """Replace every eligible header with its first applicable
    abbreviation. The seed only picks among exact-map alternatives."""
    rng = SplitMix64(seed)
    new_header = []
    rename_map: dict[str, str] = {}
    for name in table.header:
        abbreviated = rules.apply(name, rng)
        if abbreviated is not None and abbreviated != name:
            rename_map[name] = abbreviated
            new_header.append(abbreviated)
        else:
            new_header.append(name)
    return Table(new_header, table.rows, table.caption), rename_map


# --- column extension --------------------------------------------------------

@dataclass(frozen=True)
class ExtensionReport:
    table: Table
    split_columns: tuple[str, ...]
    rejections: dict[str, str]

    @property
    def changed(self) -> bool:
        return bool(self.split_columns)


def _consistent_delimiter(cells: Sequence[str],
                          delimiters: Sequence[str]) -> str | None:
    """The single delimiter on which every non-empty cell splits into
    exactly two parts, if one exists."""
    non_empty = [c for c in cells if c.strip()]
    if not non_empty:
        return None
    for delim in delimiters:
        if all(len(cell.split(delim)) == 2 for cell in non_empty):
            return delim
    return None


def rta_column_extension(table: Table,
                         delimiters: Sequence[str] = DEFAULT_DELIMITERS) -> ExtensionReport:
    """Split every compound column whose cells all break into two parts
    on one shared delimiter; e.g. a Score column of "3-2" cells becomes
    Score (1) / Score (2). New names come from splitting the old name
    when it contains the delimiter itself."""
    new_header: list[str] = []
    new_columns: list[list[str]] = []
    split: list[str] = []
    rejections: dict[str, str] = {}
    for idx, name in enumerate(table.header):
        cells = table.column(idx)
        delim = _consistent_delimiter(cells, delimiters)
        if delim is None:
            reason = "no consistent two-part delimiter"
            if not any(c.strip() for c in cells):
                reason = "no non-empty cells"
            rejections[name] = reason
            new_header.append(name)
            new_columns.append(cells)
            continue
        left, right = [], []
        for cell in cells:
            if cell.strip():
                a, b = cell.split(delim)
                left.append(a.strip())
                right.append(b.strip())
            else:
                left.append("")
                right.append("")
        if delim in name and len(name.split(delim)) == 2:
            name_a, name_b = (part.strip() for part in name.split(delim))
        else:
            name_a, name_b = f"{name} (1)", f"{name} (2)"
        split.append(name)
        new_header.extend([name_a, name_b])
        new_columns.extend([left, right])
    rows = [tuple(col[i] for col in new_columns) for i in range(len(table.rows))]
    return ExtensionReport(
        table=Table(new_header, rows, table.caption),
        split_columns=tuple(split),
        rejections=rejections,
    )


# --- column masking ----------------------------------------------------------

@dataclass(frozen=True)
class InferableColumn:
    index: int
    evidence: str


def _as_number(cell: str) -> float | None:
    text = cell.strip().replace(",", "")
    if not re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)", text):
        return None
    return float(text)


def _dense_ranks(values: Sequence[float], descending: bool) -> list[int]:
    ordered = sorted(set(values), reverse=descending)
    rank_of = {v: i + 1 for i, v in enumerate(ordered)}
    return [rank_of[v] for v in values]


def detect_inferable_columns(table: Table) -> list[InferableColumn]:
    """Columns whose content follows from another column: exact
    duplicates, or dense ranks (ascending or descending) of a numeric
    column. Needs at least two rows of evidence."""
    if len(table.rows) < 2:
        raise ValueError("need at least 2 rows to detect inferable columns")
    width = table.width
    columns = [table.column(i) for i in range(width)]
    numeric = [
        [_as_number(c) for c in col] if all(_as_number(c) is not None for c in col)
        else None
        for col in columns
    ]
    found: list[InferableColumn] = []
    for i in range(width):
        evidence = None
        for j in range(width):
            if i == j:
                continue
            if columns[i] == columns[j] and j < i:
                evidence = f"duplicate of column {table.header[j]!r}"
                break
            if numeric[i] is not None and numeric[j] is not None:
                candidate = numeric[i]
                if all(v == int(v) for v in candidate):
                    ints = [int(v) for v in candidate]
                    if ints == _dense_ranks(numeric[j], True):
                        evidence = f"dense rank of column {table.header[j]!r} descending"
                        break
                    if ints == _dense_ranks(numeric[j], False):
                        evidence = f"dense rank of column {table.header[j]!r} ascending"
                        break
        if evidence:
            found.append(InferableColumn(index=i, evidence=evidence))
    return found


def mask_column(table: Table, index: int) -> Table:
    """Remove one column from the header and every row."""
    if not 0 <= index < table.width:
        raise IndexError(f"column index {index} out of range for width {table.width}")
    if table.width < 2:
        raise ValueError("cannot mask the last remaining column")
    header = [h for i, h in enumerate(table.header) if i != index]
    rows = [tuple(c for i, c in enumerate(row) if i != index) for row in table.rows]
    return Table(header, rows, table.caption)


# --- NLQ synonym attack ------------------------------------------------------

_TOKEN = re.compile(r"[A-Za-z0-9']+")


def _find_matches(question: str, lexicon: SynonymLexicon) -> list[tuple[int, int, str]]:
    """All (start, end, phrase) lexicon hits on word boundaries,
    longest phrases first, then by position."""
    lowered = question.lower()
    hits = []
    for phrase in lexicon.entries:
        if " " not in phrase and phrase in STOPWORDS:
            continue
        for match in re.finditer(rf"(?<![\w']){re.escape(phrase)}(?![\w'])", lowered):
            hits.append((match.start(), match.end(), phrase))
    hits.sort(key=lambda h: (-(h[1] - h[0]), h[0], h[2]))
    return hits


def _substitute(question: str, start: int, end: int, replacement: str) -> str:
    original = question[start:end]
    if original[:1].isupper():
        replacement = replacement[:1].upper() + replacement[1:]
    return question[:start] + replacement + question[end:]


def rta_nlq_synonym_attack(
    question: str,
    lexicon: SynonymLexicon,
    model: "Callable[[str], Sequence[str]] | None" = None,
    budget: int = 8,
) -> str | None:
    """Single-phrase synonym substitution on the question.

    Candidates are tried longest-match first, up to ``budget``. With a
    model callback (question -> predicted answers), the first candidate
    that flips the prediction wins; otherwise the highest-priority
    candidate is returned. None means no lexicon phrase matched.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    hits = _find_matches(question, lexicon)
    if not hits:
        return None
    candidates = []
    for start, end, phrase in hits[:budget]:
        replacement = lexicon.get(phrase)[0]
        candidates.append(_substitute(question, start, end, replacement))
    if model is None:
        return candidates[0]
    from .metrics import predictions_equal  # local import, avoids cycle at module load

    baseline = list(model(question))
    for candidate in candidates:
        prediction = list(model(candidate))
        if not predictions_equal(prediction, baseline):
            return candidate
    return candidates[0]
