"""Core data model: tables, QA examples, perturbation specs, paired records.

Everything here is immutable after construction and serializes to
line-delimited JSON (UTF-8, LF, one record per line) with a fixed key
order and compact separators, so equal datasets always produce
byte-identical streams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

PERTURBATION_LEVELS = ("header", "content", "nlq", "mix")

# canonical type order; also the row order of robustness reports
PERTURBATION_TYPES = (
    "header_synonym",
    "header_abbrev",
    "row_shuffle",
    "col_shuffle",
    "col_extension",
    "col_masking",
    "col_adding",
    "nlq_word",
    "nlq_sentence",
    "mix",
)

TYPE_LEVELS: dict[str, str] = {
    "header_synonym": "header",
    "header_abbrev": "header",
    "row_shuffle": "content",
    "col_shuffle": "content",
    "col_extension": "content",
    "col_masking": "content",
    "col_adding": "content",
    "nlq_word": "nlq",
    "nlq_sentence": "nlq",
    "mix": "mix",
}

PROVENANCES = ("human", "rta", "leta", "heuristic")


class SchemaError(ValueError):
    """A record violates the data model. ``path`` locates the field and,
    for stream parsing, ``line`` is the 1-based line number."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if path:
            prefix += f"{path}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Table:
    """An ordered header plus string-celled rows. Cells are stored as
    strings only; numeric interpretation happens in answer
    normalization, never here."""

    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    caption: str | None = None

    def __init__(self, header: Iterable[str], rows: Iterable[Iterable[str]],
                 caption: str | None = None):
        object.__setattr__(self, "header", tuple(header))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "caption", caption)

    @property
    def width(self) -> int:
        return len(self.header)

    def column(self, index: int) -> list[str]:
        return [row[index] for row in self.rows]

    def cells(self) -> Iterator[str]:
        for row in self.rows:
            yield from row


def validate_table(table: Table) -> list[str]:
    """Return all invariant violations (empty list means valid)."""
    violations: list[str] = []
    if not table.header:
        violations.append("empty header")
    for i, name in enumerate(table.header):
        if not name.strip():
            violations.append(f"empty header name at {i}")
    for i, row in enumerate(table.rows):
        if len(row) != len(table.header):
            violations.append(
                f"row {i} length {len(row)} != header length {len(table.header)}"
            )
    return violations


@dataclass(frozen=True)
class QAExample:
    """One table, one question, at least one gold answer.

    SQA-style conversational data is kept flat: members of a question
    sequence carry (sequence_id, position_in_sequence).
    """

    id: str
    table: Table
    question: str
    answers: tuple[str, ...]
    sequence_id: str | None = None
    position_in_sequence: int | None = None

    def __init__(self, id: str, table: Table, question: str,
                 answers: Iterable[str], sequence_id: str | None = None,
                 position_in_sequence: int | None = None):
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "question", question)
        object.__setattr__(self, "answers", tuple(answers))
        object.__setattr__(self, "sequence_id", sequence_id)
        object.__setattr__(self, "position_in_sequence", position_in_sequence)

    def replace(self, **changes: Any) -> "QAExample":
        fields = {
            "id": self.id,
            "table": self.table,
            "question": self.question,
            "answers": self.answers,
            "sequence_id": self.sequence_id,
            "position_in_sequence": self.position_in_sequence,
        }
        fields.update(changes)
        return QAExample(**fields)


def validate_example(example: QAExample) -> list[str]:
    violations = [f"table: {v}" for v in validate_table(example.table)]
    if not example.id:
        violations.append("empty id")
    if not example.answers:
        violations.append("answers must be non-empty")
    has_seq = example.sequence_id is not None
    has_pos = example.position_in_sequence is not None
    if has_seq != has_pos:
        violations.append("sequence_id and position_in_sequence must be set together")
    if has_pos and example.position_in_sequence < 0:
        violations.append("position_in_sequence must be >= 0")
    return violations


@dataclass(frozen=True)
class PerturbationSpec:
    """Which perturbation to apply and how: level, type, seed, and
    type-specific params (e.g. masked column index, mix constituents)."""

    level: str
    type: str
    seed: int
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.level not in PERTURBATION_LEVELS:
            raise SchemaError(f"unknown level {self.level!r}", path="level")
        if self.type not in PERTURBATION_TYPES:
            raise SchemaError(f"unknown type {self.type!r}", path="type")
        if TYPE_LEVELS[self.type] != self.level:
            raise SchemaError(
                f"type {self.type!r} belongs to level {TYPE_LEVELS[self.type]!r},"
                f" not {self.level!r}",
                path="type",
            )
        if self.seed < 0:
            raise SchemaError("seed must be non-negative", path="seed")
        if self.type == "mix":
            constituents = self.params.get("constituents")
            if not isinstance(constituents, list) or not 2 <= len(constituents) <= 3:
                raise SchemaError(
                    "mix params must list 2-3 constituent specs", path="params.constituents"
                )
            levels = [c.get("level") for c in constituents]
            if "mix" in levels:
                raise SchemaError("mix constituents may not be mix", path="params.constituents")
            if len(set(levels)) != len(levels):
                raise SchemaError(
                    "mix constituents must have pairwise-distinct levels",
                    path="params.constituents",
                )


@dataclass(frozen=True)
class PerturbedPair:
    """Parallel pre/post example joined by a shared id; the unit of
    robustness evaluation."""

    id: str
    spec: PerturbationSpec
    pre: QAExample
    post: QAExample
    provenance: str

    def __post_init__(self):
        if not (self.pre.id == self.post.id == self.id):
            raise SchemaError(
                f"pair id {self.id!r} must equal pre.id {self.pre.id!r}"
                f" and post.id {self.post.id!r}",
                path="id",
            )
        if self.provenance not in PROVENANCES:
            raise SchemaError(f"unknown provenance {self.provenance!r}", path="provenance")
        if self.spec.type in ("row_shuffle", "col_shuffle") and (
            self.pre.answers != self.post.answers
        ):
            raise SchemaError("shuffle must preserve answers element-wise", path="post.answers")


@dataclass(frozen=True)
class Dataset:
    """Named, ordered collection of examples or pairs (never both)."""

    name: str
    examples: tuple[Any, ...]

    def __init__(self, name: str, examples: Iterable[QAExample | PerturbedPair]):
        items = tuple(examples)
        kinds = {type(e) for e in items}
        if len(kinds) > 1:
            raise SchemaError("dataset elements must be homogeneous")
        seen: set[str] = set()
        for e in items:
            if e.id in seen:
                raise SchemaError(f"duplicate id {e.id!r}")
            seen.add(e.id)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "examples", items)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)


# --- JSONL decoding -------------------------------------------------------

def _expect(obj: dict, key: str, kind: type, path: str, line: int | None,
            optional: bool = False) -> Any:
    if key not in obj:
        if optional:
            return None
        raise SchemaError("missing field", path=f"{path}{key}", line=line)
    value = obj[key]
    if optional and value is None:
        return None
    if kind is int and isinstance(value, bool):
        raise SchemaError("expected integer, got boolean", path=f"{path}{key}", line=line)
    if not isinstance(value, kind):
        raise SchemaError(
            f"expected {kind.__name__}, got {type(value).__name__}",
            path=f"{path}{key}", line=line,
        )
    return value


def _string_list(value: Any, path: str, line: int | None) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError("expected list of strings", path=path, line=line)
    return value


def table_from_obj(obj: Any, path: str = "table", line: int | None = None) -> Table:
    if not isinstance(obj, dict):
        raise SchemaError("expected object", path=path, line=line)
    header = _string_list(obj.get("header"), f"{path}.header", line)
    rows_raw = obj.get("rows")
    if not isinstance(rows_raw, list):
        raise SchemaError("expected list of rows", path=f"{path}.rows", line=line)
    rows = [_string_list(r, f"{path}.rows[{i}]", line) for i, r in enumerate(rows_raw)]
    caption = _expect(obj, "caption", str, f"{path}.", line, optional=True)
    table = Table(header, rows, caption)
    violations = validate_table(table)
    if violations:
        raise SchemaError("; ".join(violations), path=path, line=line)
    return table


def example_from_obj(obj: Any, path: str = "", line: int | None = None) -> QAExample:
    if not isinstance(obj, dict):
        raise SchemaError("expected object", path=path or "record", line=line)
    prefix = f"{path}." if path else ""
    example = QAExample(
        id=_expect(obj, "id", str, prefix, line),
        table=table_from_obj(obj.get("table"), f"{prefix}table", line),
        question=_expect(obj, "question", str, prefix, line),
        answers=_string_list(obj.get("answers"), f"{prefix}answers", line),
        sequence_id=_expect(obj, "sequence_id", str, prefix, line, optional=True),
        position_in_sequence=_expect(obj, "position_in_sequence", int, prefix, line,
                                     optional=True),
    )
    violations = validate_example(example)
    if violations:
        raise SchemaError("; ".join(violations), path=path or "record", line=line)
    return example


def spec_from_obj(obj: Any, line: int | None = None) -> PerturbationSpec:
    if not isinstance(obj, dict):
        raise SchemaError("expected object", path="perturbation", line=line)
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("expected object", path="perturbation.params", line=line)
    try:
        return PerturbationSpec(
            level=_expect(obj, "level", str, "perturbation.", line),
            type=_expect(obj, "type", str, "perturbation.", line),
            seed=_expect(obj, "seed", int, "perturbation.", line),
            params=params,
        )
    except SchemaError as err:
        if err.line is None and err.path and not err.path.startswith("perturbation"):
            raise SchemaError(str(err), path=f"perturbation.{err.path}", line=line) from None
        raise


def pair_from_obj(obj: Any, line: int | None = None) -> PerturbedPair:
    if not isinstance(obj, dict):
        raise SchemaError("expected object", path="record", line=line)
    try:
        return PerturbedPair(
            id=_expect(obj, "id", str, "", line),
            spec=spec_from_obj(obj.get("perturbation"), line),
            provenance=_expect(obj, "provenance", str, "", line),
            pre=example_from_obj(obj.get("pre"), "pre", line),
            post=example_from_obj(obj.get("post"), "post", line),
        )
    except SchemaError:
        raise
    except ValueError as err:
        raise SchemaError(str(err), line=line) from None


def parse_dataset(stream: bytes | str | Iterable[str], kind: str = "examples",
                  name: str = "dataset") -> Dataset:
    """Parse a JSONL stream of example or pair records.

    Raises SchemaError with the offending line number on malformed
    JSON, schema violations, and duplicate ids.
    """
    if kind not in ("examples", "pairs"):
        raise ValueError(f"kind must be 'examples' or 'pairs', got {kind!r}")
    # split strictly on LF: cell text may contain exotic line separators
    # (U+0085, U+2028) that universal splitlines would break records on
    if isinstance(stream, bytes):
        lines = stream.decode("utf-8").split("\n")
    elif isinstance(stream, str):
        lines = stream.split("\n")
    else:
        lines = [line.rstrip("\n") for line in stream]

    records: list[QAExample | PerturbedPair] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise SchemaError(f"malformed JSON ({err.msg})", line=lineno) from None
        record = example_from_obj(obj, line=lineno) if kind == "examples" \
            else pair_from_obj(obj, line=lineno)
        if record.id in seen:
            raise SchemaError(f"duplicate id {record.id!r}", line=lineno)
        seen.add(record.id)
        records.append(record)
    return Dataset(name, records)


def load_dataset(path: str, kind: str = "examples") -> Dataset:
    with open(path, "rb") as handle:
        return parse_dataset(handle.read(), kind=kind, name=path)


# --- JSONL encoding -------------------------------------------------------

def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def table_to_obj(table: Table) -> dict:
    obj: dict[str, Any] = {"header": list(table.header),
                           "rows": [list(r) for r in table.rows]}
    if table.caption is not None:
        obj["caption"] = table.caption
    return obj


def example_to_obj(example: QAExample) -> dict:
    obj: dict[str, Any] = {
        "id": example.id,
        "table": table_to_obj(example.table),
        "question": example.question,
        "answers": list(example.answers),
    }
    if example.sequence_id is not None:
        obj["sequence_id"] = example.sequence_id
        obj["position_in_sequence"] = example.position_in_sequence
    return obj


def spec_to_obj(spec: PerturbationSpec) -> dict:
    # params keys sorted so equal specs always encode identically
    return {
        "level": spec.level,
        "type": spec.type,
        "seed": spec.seed,
        "params": json.loads(_dump(_sorted_params(spec.params))),
    }


def _sorted_params(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _sorted_params(value[k]) for k in sorted(value)}
    if isinstance(value, list):
        return [_sorted_params(v) for v in value]
    return value


def pair_to_obj(pair: PerturbedPair) -> dict:
    return {
        "id": pair.id,
        "perturbation": spec_to_obj(pair.spec),
        "provenance": pair.provenance,
        "pre": example_to_obj(pair.pre),
        "post": example_to_obj(pair.post),
    }


def serialize_dataset(dataset: Dataset) -> bytes:
    """Byte-stable JSONL: parse(serialize(d)) == d field-for-field and
    serializing twice yields identical bytes."""
    lines = []
    for record in dataset.examples:
        obj = pair_to_obj(record) if isinstance(record, PerturbedPair) \
            else example_to_obj(record)
        lines.append(_dump(obj))
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")


def save_dataset(dataset: Dataset, path: str) -> None:
    with open(path, "wb") as handle:
        handle.write(serialize_dataset(dataset))
