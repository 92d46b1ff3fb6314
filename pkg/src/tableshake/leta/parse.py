"""Completion parsing.

Each template ends in a typed answer anchor; the parser scans the raw
completion for the last anchored line and extracts the payload. It
never raises on arbitrary text: failures come back as ParseFailure
values (missing delimiter, empty payload, wrong arity).
"""

from __future__ import annotations

from dataclasses import dataclass

from .pools import ParaphraseCategory
from .prompts import ANCHORS


@dataclass(frozen=True)
class ParseFailure:
    reason: str


@dataclass(frozen=True)
class HeaderRename:
    new_header: tuple[str, ...]
    rename_map: dict[str, str]

    def key(self) -> str:
        return "|".join(n.lower() for n in self.new_header)


@dataclass(frozen=True)
class ColumnExtension:
    column: str
    new_names: tuple[str, str]

    def key(self) -> str:
        return f"{self.column.lower()}->{self.new_names[0].lower()}|{self.new_names[1].lower()}"


@dataclass(frozen=True)
class ColumnMask:
    column: str

    def key(self) -> str:
        return self.column.lower()


@dataclass(frozen=True)
class ColumnAdd:
    columns: tuple[str, ...]

    def key(self) -> str:
        return "|".join(sorted(c.lower() for c in self.columns))


@dataclass(frozen=True)
class Paraphrase:
    text: str

    def key(self) -> str:
        return " ".join(self.text.lower().split())


Candidate = HeaderRename | ColumnExtension | ColumnMask | ColumnAdd | Paraphrase


def _anchor_for(type_or_category: str | ParaphraseCategory) -> str:
    if isinstance(type_or_category, ParaphraseCategory):
        return ANCHORS["nlq"]
    anchor = ANCHORS.get(type_or_category)
    if anchor is None:
        raise ValueError(f"no anchor for type {type_or_category!r}")
    return anchor


def _payload(raw_text: str, anchor: str) -> str | ParseFailure:
    payload = None
    for line in raw_text.splitlines():
        stripped = line.strip()
        if stripped.startswith(anchor):
            payload = stripped[len(anchor):].strip()
    if payload is None:
        return ParseFailure(f"missing delimiter {anchor!r}")
    if not payload:
        return ParseFailure("empty payload")
    return payload


def _split_names(payload: str) -> list[str]:
    return [part.strip() for part in payload.split("|")]


def parse_generation(type_or_category: str | ParaphraseCategory, raw_text: str,
                     original_header: tuple[str, ...] | None = None
                     ) -> Candidate | ParseFailure:
    """Extract the typed payload from a model completion.

    Header parsing needs the original header to check arity and derive
    the rename map.
    """
    payload = _payload(raw_text, _anchor_for(type_or_category))
    if isinstance(payload, ParseFailure):
        return payload

    if isinstance(type_or_category, ParaphraseCategory):
        return Paraphrase(text=payload)

    if type_or_category in ("header_synonym", "header_abbrev"):
        if original_header is None:
            raise ValueError("header parsing requires the original header")
        names = _split_names(payload)
        if len(names) != len(original_header):
            return ParseFailure(
                f"wrong arity: got {len(names)} names for"
                f" {len(original_header)} columns"
            )
        if any(not n for n in names):
            return ParseFailure("empty payload")
        rename_map = {
            old: new for old, new in zip(original_header, names) if old != new
        }
        return HeaderRename(new_header=tuple(names), rename_map=rename_map)

    if type_or_category == "col_extension":
        if "->" not in payload:
            return ParseFailure("missing '->' between column and new names")
        column, names_part = payload.split("->", 1)
        names = _split_names(names_part)
        if len(names) != 2 or any(not n for n in names):
            return ParseFailure(f"wrong arity: expected 2 new names, got {len(names)}")
        column = column.strip()
        if not column:
            return ParseFailure("empty payload")
        return ColumnExtension(column=column, new_names=(names[0], names[1]))

    if type_or_category == "col_masking":
        if "|" in payload:
            return ParseFailure("wrong arity: expected exactly 1 column")
        return ColumnMask(column=payload)

    if type_or_category == "col_adding":
        names = _split_names(payload)
        if not 1 <= len(names) <= 2 or any(not n for n in names):
            return ParseFailure(f"wrong arity: expected 1-2 columns, got {len(names)}")
        return ColumnAdd(columns=tuple(names))

    raise ValueError(f"no parser for type {type_or_category!r}")
