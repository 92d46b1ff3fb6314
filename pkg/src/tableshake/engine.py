"""Deterministic perturbation operator framework.

Operators are pure functions of (example, spec, resources). The same
(example, spec) always yields the same pair, byte for byte: each
application derives its RNG stream from the spec seed mixed with the
example id and the operator name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from . import rta
from .data import (PerturbationSpec, PerturbedPair, QAExample, Table,
                   TYPE_LEVELS, validate_table)
from .retrieval import NoInsertableColumn, TableIndex, add_columns, retrieve
from .rng import SplitMix64, derive_seed, fisher_yates

# sub-seed offsets for mix constituents, one per level
MIX_SEED_OFFSETS = {"header": 1, "content": 2, "nlq": 3}

MIX_LEVEL_ORDER = ("header", "content", "nlq")


class PerturbationError(RuntimeError):
    """Operator failure, tagged with the perturbation type."""

    def __init__(self, type_name: str, message: str):
        self.type_name = type_name
        super().__init__(f"{type_name}: {message}")


class MissingResource(PerturbationError):
    pass


@dataclass(frozen=True)
class PerturbationOutcome:
    """Either a produced pair or the reason the example was skipped."""

    pair: PerturbedPair | None = None
    skip_reason: str | None = None

    def __post_init__(self):
        if (self.pair is None) == (self.skip_reason is None):
            raise ValueError("exactly one of pair/skip_reason must be set")

    @property
    def skipped(self) -> bool:
        return self.pair is None


def produced(pair: PerturbedPair) -> PerturbationOutcome:
    return PerturbationOutcome(pair=pair)


def skipped(reason: str) -> PerturbationOutcome:
    return PerturbationOutcome(skip_reason=reason)


# --- structural shuffles ----------------------------------------------------

def shuffle_rows(table: Table, seed: int) -> Table:
    """Fisher-Yates permutation of the rows; header untouched."""
    perm = fisher_yates(len(table.rows), SplitMix64(seed))
    return Table(table.header, [table.rows[i] for i in perm], table.caption)


def shuffle_columns(table: Table, seed: int) -> Table:
    """One Fisher-Yates permutation applied to the header and to every
    row identically."""
    perm = fisher_yates(table.width, SplitMix64(seed))
    header = [table.header[i] for i in perm]
    rows = [tuple(row[i] for i in perm) for row in table.rows]
    return Table(header, rows, table.caption)


# --- positional-question filter ----------------------------------------------

# Recall-oriented: matching questions are excluded from shuffles. False
# positives only shrink the shuffle set, never corrupt it.
_POSITIONAL_PHRASES = (
    "listed",
    "on the table",
    "first row",
    "last row",
    "top of the",
    "bottom of the",
    "comes first",
    "comes last",
    "above",
    "below",
)
_POSITIONAL_RE = [
    re.compile(rf"(?<![\w']){re.escape(p)}(?![\w'])") for p in _POSITIONAL_PHRASES
]
_ANCHOR_WORDS = {"table", "list", "chart", "row"}
_ORDER_WORDS = {"first", "last"}


def is_position_dependent(question: str) -> bool:
    """True when the question plausibly asks about absolute table
    position, so shuffling would change its answer."""
    lowered = question.lower()
    if any(rx.search(lowered) for rx in _POSITIONAL_RE):
        return True
    tokens = re.findall(r"[a-z0-9']+", lowered)
    order_positions = [i for i, t in enumerate(tokens) if t in _ORDER_WORDS]
    anchor_positions = [i for i, t in enumerate(tokens) if t in _ANCHOR_WORDS]
    return any(
        abs(i - j) <= 3 for i in order_positions for j in anchor_positions
    )


# --- operator context and registry -------------------------------------------

@dataclass
class OperatorContext:
    """Shared read-only resources handed to operators."""

    synonyms: rta.SynonymLexicon | None = None
    abbreviations: rta.AbbreviationRuleSet | None = None
    nlq_word_lexicon: rta.SynonymLexicon | None = None
    nlq_sentence_lexicon: rta.SynonymLexicon | None = None
    retriever: TableIndex | None = None
    model: "Callable[[Table, str], list[str]] | None" = None

    def require(self, name: str, type_name: str):
        resource = getattr(self, name)
        if resource is None:
            raise MissingResource(type_name, f"missing resource {name!r}")
        return resource


Operator = Callable[[QAExample, PerturbationSpec, OperatorContext, int],
                    "QAExample | str"]

# operator + the provenance its pairs carry
_REGISTRY: dict[str, tuple[Operator, str]] = {}


def register(type_name: str, provenance: str):
    def wrap(fn: Operator) -> Operator:
        _REGISTRY[type_name] = (fn, provenance)
        return fn
    return wrap


def registered_types() -> list[str]:
    return sorted(_REGISTRY)


@register("row_shuffle", "heuristic")
def _op_row_shuffle(example, spec, ctx, seed):
    if is_position_dependent(example.question):
        return "position-dependent question"
    return example.replace(table=shuffle_rows(example.table, seed))


@register("col_shuffle", "heuristic")
def _op_col_shuffle(example, spec, ctx, seed):
    if is_position_dependent(example.question):
        return "position-dependent question"
    return example.replace(table=shuffle_columns(example.table, seed))


@register("header_synonym", "rta")
def _op_header_synonym(example, spec, ctx, seed):
    lexicon = ctx.require("synonyms", "header_synonym")
    rate = float(spec.params.get("rate", rta.HEADER_REPLACE_RATE))
    table, renamed = rta.rta_header_synonym(example.table, lexicon, seed, rate)
    if not renamed:
        return "no header renamed"
    return example.replace(table=table)


@register("header_abbrev", "rta")
def _op_header_abbrev(example, spec, ctx, seed):
    rules = ctx.require("abbreviations", "header_abbrev")
    table, renamed = rta.rta_header_abbreviation(example.table, rules, seed)
    if not renamed:
        return "no abbreviatable header"
    return example.replace(table=table)


@register("col_extension", "rta")
def _op_col_extension(example, spec, ctx, seed):
    delimiters = tuple(spec.params.get("delimiters", rta.DEFAULT_DELIMITERS))
    report = rta.rta_column_extension(example.table, delimiters)
    if not report.changed:
        return "no splittable column"
    return example.replace(table=report.table)


@register("col_masking", "rta")
def _op_col_masking(example, spec, ctx, seed):
    table = example.table
    if table.width < 2:
        return "single-column table"
    index = spec.params.get("index")
    if index is None:
        if len(table.rows) < 2:
            return "too few rows to detect inferable columns"
        inferable = rta.detect_inferable_columns(table)
        if not inferable:
            return "no inferable column"
        index = inferable[0].index
    return example.replace(table=rta.mask_column(table, int(index)))


@register("col_adding", "rta")
def _op_col_adding(example, spec, ctx, seed):
    index = ctx.require("retriever", "col_adding")
    k = int(spec.params.get("k", 3))
    n = int(spec.params.get("n", 1))
    candidates = [t for t, _ in retrieve(index, example.table, k)]
    try:
        table, _added = add_columns(example.table, candidates, n, seed)
    except NoInsertableColumn as err:
        return str(err)
    return example.replace(table=table)


def _nlq_attack(example, ctx, lexicon, budget):
    model = ctx.model
    callback = None
    if model is not None:
        callback = lambda q: model(example.table, q)  # noqa: E731
    return rta.rta_nlq_synonym_attack(example.question, lexicon, callback, budget)


@register("nlq_word", "rta")
def _op_nlq_word(example, spec, ctx, seed):
    lexicon = ctx.require("nlq_word_lexicon", "nlq_word")
    budget = int(spec.params.get("budget", 8))
    question = _nlq_attack(example, ctx, lexicon, budget)
    if question is None or question == example.question:
        return "no lexicon match"
    return example.replace(question=question)


@register("nlq_sentence", "rta")
def _op_nlq_sentence(example, spec, ctx, seed):
    lexicon = ctx.require("nlq_sentence_lexicon", "nlq_sentence")
    budget = int(spec.params.get("budget", 8))
    question = _nlq_attack(example, ctx, lexicon, budget)
    if question is None or question == example.question:
        return "no lexicon match"
    return example.replace(question=question)


# --- application -------------------------------------------------------------

def _check_post(example: QAExample, post: QAExample, type_name: str) -> None:
    if post.answers != example.answers:
        raise PerturbationError(type_name, "operator modified the answers")
    if post.id != example.id:
        raise PerturbationError(type_name, "operator modified the id")
    violations = validate_table(post.table)
    if violations:
        raise PerturbationError(type_name, "invalid post table: " + "; ".join(violations))


def apply_perturbation(example: QAExample, spec: PerturbationSpec,
                       ctx: OperatorContext) -> PerturbationOutcome:
    """Run one registered operator on one example.

    Successful runs return a pair with pre = the input example; filtered
    inputs return a skip reason. Answers are never modified.
    """
    if spec.type == "mix":
        constituents = [
            PerturbationSpec(level=c["level"], type=c["type"],
                             seed=c.get("seed", spec.seed), params=c.get("params", {}))
            for c in spec.params["constituents"]
        ]
        return compose_mix(example, constituents, spec.seed, ctx)
    if spec.type not in _REGISTRY:
        raise PerturbationError(spec.type, "type not registered")
    fn, provenance = _REGISTRY[spec.type]
    seed = derive_seed(spec.seed, spec.type, example.id)
    result = fn(example, spec, ctx, seed)
    if isinstance(result, str):
        return skipped(result)
    _check_post(example, result, spec.type)
    return produced(PerturbedPair(
        id=example.id, spec=spec, pre=example, post=result, provenance=provenance,
    ))


def compose_mix(example: QAExample, constituent_specs: list[PerturbationSpec],
                seed: int, ctx: OperatorContext) -> PerturbationOutcome:
    """Apply 2-3 perturbations of pairwise-distinct levels in the fixed
    canonical order header -> content -> nlq; constituents are recorded
    in the resulting spec's params."""
    if not 2 <= len(constituent_specs) <= 3:
        raise PerturbationError("mix", f"need 2-3 constituents, got {len(constituent_specs)}")
    levels = [s.level for s in constituent_specs]
    for level in levels:
        if level not in MIX_LEVEL_ORDER:
            raise PerturbationError("mix", f"constituent level {level!r} not allowed")
    duplicates = {l for l in levels if levels.count(l) > 1}
    if duplicates:
        raise PerturbationError("mix", f"duplicate level: {sorted(duplicates)[0]}")

    ordered = sorted(constituent_specs, key=lambda s: MIX_LEVEL_ORDER.index(s.level))
    current = example
    provenances: list[str] = []
    applied: list[dict] = []
    for sub in ordered:
        sub_seed = seed + MIX_SEED_OFFSETS[sub.level]
        sub_spec = PerturbationSpec(level=sub.level, type=sub.type, seed=sub_seed,
                                    params=sub.params)
        outcome = apply_perturbation(current, sub_spec, ctx)
        if outcome.skipped:
            return skipped(f"{sub.type}: {outcome.skip_reason}")
        provenances.append(outcome.pair.provenance)
        applied.append({"level": sub.level, "type": sub.type, "seed": sub_seed,
                        "params": sub.params})
        current = outcome.pair.post
    mix_spec = PerturbationSpec(level="mix", type="mix", seed=seed,
                                params={"constituents": applied})
    provenance = "rta" if any(p == "rta" for p in provenances) else "heuristic"
    return produced(PerturbedPair(
        id=example.id, spec=mix_spec, pre=example, post=current,
        provenance=provenance,
    ))


@dataclass
class RunSummary:
    """Per-type production/skip tallies for a dataset run."""

    produced: int = 0
    skips: dict[str, int] = field(default_factory=dict)

    def record_skip(self, reason: str) -> None:
        self.skips[reason] = self.skips.get(reason, 0) + 1


def perturb_dataset(examples, spec: PerturbationSpec,
                    ctx: OperatorContext) -> tuple[list[PerturbedPair], RunSummary]:
    """Apply one spec across a dataset, preserving input order."""
    pairs: list[PerturbedPair] = []
    summary = RunSummary()
    for example in examples:
        outcome = apply_perturbation(example, spec, ctx)
        if outcome.skipped:
            summary.record_skip(outcome.skip_reason)
        else:
            pairs.append(outcome.pair)
            summary.produced += 1
    return pairs, summary
