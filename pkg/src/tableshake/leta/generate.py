"""The multi-round generation loop: prompt -> complete -> parse ->
validate, with deduplication by normalized payload."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..data import PerturbationSpec, PerturbedPair, QAExample, Table
from ..llm import CompletionRequest, LlmClient, LlmError
from ..rng import derive_seed
from .parse import ParseFailure, parse_generation
from .pools import (CONTENT_TYPES, HEADER_TYPES, DemonstrationPool,
                    ParaphraseCategory)
from .prompts import ANCHORS, build_prompt
from .validate import validate_candidate

DEFAULT_ROUNDS = 3
DEFAULT_TEMPERATURE = 0.7


@dataclass(frozen=True)
class GenerationConfig:
    rounds: int = DEFAULT_ROUNDS
    temperature: float = DEFAULT_TEMPERATURE
    max_candidates_per_round: int = 1
    max_tokens: int = 256
    model: str | None = None
    # the table-content types may route to a different (code-oriented)
    # model than the text types; both share one client contract
    model_overrides: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_candidates_per_round < 1:
            raise ValueError("max_candidates_per_round must be >= 1")

    def model_for(self, type_name: str) -> str | None:
        return self.model_overrides.get(type_name, self.model)


@dataclass
class GenerationLog:
    """What happened across the rounds for one example."""

    transport_errors: list[str] = field(default_factory=list)
    parse_errors: list[str] = field(default_factory=list)
    rejections: dict[str, int] = field(default_factory=dict)
    accepted: int = 0
    duplicates: int = 0

    def record_rejection(self, reason: str) -> None:
        self.rejections[reason] = self.rejections.get(reason, 0) + 1

    def merge(self, other: "GenerationLog") -> None:
        self.transport_errors.extend(other.transport_errors)
        self.parse_errors.extend(other.parse_errors)
        for reason, count in other.rejections.items():
            self.rejections[reason] = self.rejections.get(reason, 0) + count
        self.accepted += other.accepted
        self.duplicates += other.duplicates


@dataclass
class GenerationResult:
    pairs: list[PerturbedPair]
    log: GenerationLog


def _spec_for(type_or_category: str | ParaphraseCategory, seed: int) -> PerturbationSpec:
    if isinstance(type_or_category, ParaphraseCategory):
        return PerturbationSpec(
            level="nlq", type=type_or_category.perturbation_type, seed=seed,
            params={"category": type_or_category.name},
        )
    level = "header" if type_or_category in HEADER_TYPES else "content"
    return PerturbationSpec(level=level, type=type_or_category, seed=seed, params={})


def generate(type_or_category: str | ParaphraseCategory,
             example: QAExample,
             pool: DemonstrationPool,
             client: LlmClient,
             config: GenerationConfig | None = None,
             seed: int = 0,
             candidate_table: Table | None = None) -> GenerationResult:
    """Run the full loop for one example and one perturbation type.

    Each round renders a (seeded) prompt, requests completions, parses
    and validates them. Accepted candidates are deduplicated by
    normalized payload and returned as pairs with provenance "leta".
    An example with zero accepted candidates yields an empty list.
    """
    config = config or GenerationConfig()
    log = GenerationLog()
    accepted: dict[str, QAExample] = {}
    model = config.model_for(
        type_or_category.perturbation_type
        if isinstance(type_or_category, ParaphraseCategory) else type_or_category
    )

    for round_index in range(config.rounds):
        round_seed = derive_seed(seed, "round", round_index)
        prompt = build_prompt(type_or_category, pool, example, seed=round_seed,
                              candidate_table=candidate_table)
        for _ in range(config.max_candidates_per_round):
            try:
                text = client.complete(CompletionRequest(
                    prompt=prompt, temperature=config.temperature,
                    max_tokens=config.max_tokens, model=model,
                ))
            except LlmError as err:
                log.transport_errors.append(f"round {round_index}: {err}")
                continue
            candidate = parse_generation(type_or_category, text,
                                         original_header=example.table.header)
            if isinstance(candidate, ParseFailure):
                log.parse_errors.append(f"round {round_index}: {candidate.reason}")
                continue
            result = validate_candidate(
                type_or_category, example, candidate,
                candidate_tables=[candidate_table] if candidate_table else None,
                seed=derive_seed(seed, "apply", round_index),
            )
            if not result.accepted:
                log.record_rejection(result.reason)
                continue
            key = candidate.key()
            if key in accepted:
                log.duplicates += 1
                continue
            accepted[key] = result.post
            log.accepted += 1

    spec = _spec_for(type_or_category, seed)
    pairs = [
        PerturbedPair(id=example.id, spec=spec, pre=example, post=post,
                      provenance="leta")
        for post in accepted.values()
    ]
    return GenerationResult(pairs=pairs, log=log)


class GoldEchoClient(LlmClient):
    """Test double that answers every prompt with the demonstration
    output recorded for the prompt's target. Running the pools through
    it must come back 100% accepted."""

    def __init__(self, pool: DemonstrationPool,
                 type_or_category: str | ParaphraseCategory):
        self._pool = pool
        self._key = type_or_category

    def complete(self, request: CompletionRequest) -> str:
        lines = request.prompt.splitlines()
        demos = self._pool.demos_for(self._key)
        if isinstance(self._key, ParaphraseCategory):
            question = _last_payload(lines, "Question: ")
            for demo in demos:
                if demo.question == question:
                    return f"{ANCHORS['nlq']} {demo.paraphrase}"
            raise LlmError(f"no demonstration matches question {question!r}")
        if self._key in HEADER_TYPES:
            header = _last_payload(lines, "Header: ")
            for demo in demos:
                if " | ".join(demo.header) == header:
                    return "New header: " + " | ".join(demo.output)
            raise LlmError(f"no demonstration matches header {header!r}")
        if self._key in CONTENT_TYPES:
            marker = "Source table:" if self._key == "col_adding" else "Table:"
            header = _block_header(lines, marker)
            for demo in demos:
                if " | ".join(demo.table.header) == header:
                    if self._key == "col_extension":
                        return (f"Extended column: {demo.column} -> "
                                + " | ".join(demo.new_names))
                    if self._key == "col_masking":
                        return f"Masked column: {demo.column}"
                    return "Added column: " + " | ".join(demo.columns)
            raise LlmError(f"no demonstration matches table header {header!r}")
        raise LlmError(f"gold echo cannot serve {self._key!r}")


def _last_payload(lines: list[str], prefix: str) -> str:
    payload = None
    for line in lines:
        if line.startswith(prefix):
            payload = line[len(prefix):]
    if payload is None:
        raise LlmError(f"prompt has no {prefix!r} line")
    return payload


def _block_header(lines: list[str], marker: str) -> str:
    """Header line of the last table block introduced by ``marker``."""
    index = None
    for i, line in enumerate(lines):
        if line == marker:
            index = i
    if index is None or index + 1 >= len(lines):
        raise LlmError(f"prompt has no {marker!r} block")
    return lines[index + 1]
