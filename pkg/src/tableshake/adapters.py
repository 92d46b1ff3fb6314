"""Model answer sources: prediction files, HTTP endpoints, a few-shot
chain-of-thought LLM adapter, and deterministic mocks for testing.

The wire contract for live models is POST /predict with
{"table": {"header": [...], "rows": [[...]]}, "question": str} and an
{"answers": [str]} response.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources as importlib_resources
from typing import Callable, Iterable, Sequence

from .data import Dataset, QAExample, PerturbedPair, Table, table_to_obj
from .llm import CompletionRequest, LlmClient, LlmError
from .retrieval import tokenize

SIDES = ("pre", "post")


class AdapterError(RuntimeError):
    pass


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    side: str
    prediction: tuple[str, ...]


def load_predictions(stream: bytes | str | Iterable[str]) -> dict[tuple[str, str], tuple[str, ...]]:
    """JSONL of {id, side, prediction} records, keyed by (id, side)."""
    if isinstance(stream, bytes):
        lines = stream.decode("utf-8").split("\n")
    elif isinstance(stream, str):
        lines = stream.split("\n")
    else:
        lines = list(stream)
    out: dict[tuple[str, str], tuple[str, ...]] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise AdapterError(f"line {lineno}: malformed JSON ({err.msg})") from None
        try:
            record = PredictionRecord(
                id=obj["id"], side=obj["side"],
                prediction=tuple(obj["prediction"]),
            )
        except (KeyError, TypeError) as err:
            raise AdapterError(f"line {lineno}: bad prediction record ({err!r})") from None
        if record.side not in SIDES:
            raise AdapterError(f"line {lineno}: unknown side {record.side!r}")
        key = (record.id, record.side)
        if key in out:
            raise AdapterError(f"line {lineno}: duplicate ({record.id!r}, {record.side!r})")
        out[key] = record.prediction
    return out


def save_predictions(predictions: dict[tuple[str, str], Sequence[str]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for (id_, side) in sorted(predictions):
            record = {"id": id_, "side": side,
                      "prediction": list(predictions[(id_, side)])}
            handle.write(json.dumps(record, ensure_ascii=False,
                                    separators=(",", ":")) + "\n")


# --- adapters ----------------------------------------------------------------

@dataclass(frozen=True)
class ModelAdapter:
    """Stateless answer function with a display name. Implementations
    must tolerate concurrent answer() calls."""

    name: str
    answer: Callable[[Table, str], list[str]]


def http_predict(endpoint: str, table: Table, question: str,
                 timeout: float = 30.0) -> list[str]:
    """One call against the /predict wire contract; the endpoint's
    answers come back verbatim."""
    import requests

    body = {"table": table_to_obj(table), "question": question}
    body["table"].pop("caption", None)
    try:
        response = requests.post(endpoint.rstrip("/") + "/predict", json=body,
                                 timeout=timeout)
    except requests.RequestException as err:
        raise AdapterError(f"transport failure: {err}") from err
    if response.status_code // 100 != 2:
        raise AdapterError(f"endpoint returned {response.status_code}")
    try:
        answers = response.json()["answers"]
    except (ValueError, KeyError) as err:
        raise AdapterError(f"malformed response body: {err!r}") from None
    if not isinstance(answers, list) or not all(isinstance(a, str) for a in answers):
        raise AdapterError("malformed response body: answers must be a string list")
    return answers


def http_adapter(endpoint: str, timeout: float = 30.0) -> ModelAdapter:
    return ModelAdapter(
        name=f"http:{endpoint}",
        answer=lambda table, question: http_predict(endpoint, table, question,
                                                    timeout=timeout),
    )


# --- few-shot chain-of-thought QA adapter -------------------------------------

QA_DEMO_COUNT = 2
ANSWER_ANCHOR = "Answer:"

QA_INSTRUCTION = (
    "Answer the question using the table. Reason step by step and finish"
    " with a line starting with \"Answer:\"; separate multiple answers"
    " with \" | \"."
)


@dataclass(frozen=True)
class QADemo:
    table: Table
    question: str
    reasoning: str  # worked chain ending in "Answer: ..."


def default_qa_demos() -> list[QADemo]:
    text = (importlib_resources.files("tableshake.resources")
            .joinpath("qa_demos.json").read_text(encoding="utf-8"))
    demos = []
    for obj in json.loads(text):
        demos.append(QADemo(
            table=Table(obj["table"]["header"], obj["table"]["rows"]),
            question=obj["question"],
            reasoning=obj["reasoning"],
        ))
    return demos


def _render_table(table: Table) -> list[str]:
    lines = [" | ".join(table.header)]
    lines.extend(" | ".join(row) for row in table.rows)
    return lines


def build_qa_cot_prompt(demonstrations: Sequence[QADemo], table: Table,
                        question: str, demo_count: int = QA_DEMO_COUNT) -> str:
    """Few-shot QA prompt: pipe-separated table, question, and worked
    demonstrations whose reasoning ends in the answer anchor."""
    if len(demonstrations) != demo_count:
        raise AdapterError(
            f"expected {demo_count} demonstrations, got {len(demonstrations)}"
        )
    parts = [QA_INSTRUCTION, ""]
    for demo in demonstrations:
        if ANSWER_ANCHOR not in demo.reasoning:
            raise AdapterError("demonstration reasoning lacks the answer anchor")
        parts.append("Table:")
        parts.extend(_render_table(demo.table))
        parts.append("Question: " + demo.question)
        parts.append(demo.reasoning)
        parts.append("")
    parts.append("Table:")
    parts.extend(_render_table(table))
    parts.append("Question: " + question)
    return "\n".join(parts)


def parse_qa_completion(text: str) -> list[str]:
    index = text.rfind(ANSWER_ANCHOR)
    if index < 0:
        raise AdapterError("unparseable completion: no answer anchor")
    payload = text[index + len(ANSWER_ANCHOR):].strip().splitlines()
    line = payload[0].strip() if payload else ""
    if not line:
        raise AdapterError("unparseable completion: empty answer")
    return [part.strip() for part in line.split("|")]


def llm_qa_adapter(client: LlmClient, demonstrations: Sequence[QADemo] | None = None,
                   temperature: float = 0.7, max_tokens: int = 256,
                   model: str | None = None) -> ModelAdapter:
    """Few-shot QA via the completion client: temperature 0.7, no
    frequency penalty, no top-k truncation."""
    demos = list(demonstrations) if demonstrations is not None else default_qa_demos()

    def answer(table: Table, question: str) -> list[str]:
        prompt = build_qa_cot_prompt(demos, table, question)
        try:
            text = client.complete(CompletionRequest(
                prompt=prompt, temperature=temperature, max_tokens=max_tokens,
                model=model,
            ))
        except LlmError as err:
            raise AdapterError(f"completion failed: {err}") from err
        return parse_qa_completion(text)

    return ModelAdapter(name="llm_qa", answer=answer)


# --- mocks --------------------------------------------------------------------

def _example_key(table: Table, question: str) -> tuple:
    return (question, table.header, table.rows)


def mock_gold_adapter(dataset: Dataset | Iterable) -> ModelAdapter:
    """Returns the stored gold answers for every registered example;
    pairs register both sides. Composing it with the metrics yields
    100% everywhere by construction."""
    answers: dict[tuple, list[str]] = {}

    def register(example: QAExample) -> None:
        answers[_example_key(example.table, example.question)] = list(example.answers)

    for record in dataset:
        if isinstance(record, PerturbedPair):
            register(record.pre)
            register(record.post)
        else:
            register(record)

    def answer(table: Table, question: str) -> list[str]:
        key = _example_key(table, question)
        if key not in answers:
            raise AdapterError(f"gold mock has no entry for question {question!r}")
        return list(answers[key])

    return ModelAdapter(name="gold", answer=answer)


def mock_first_row_adapter() -> ModelAdapter:
    """Answers with the first data row's cell in the column whose
    header overlaps the question most (ties broken by column order).
    Deliberately brittle under row shuffling."""

    def answer(table: Table, question: str) -> list[str]:
        if not table.rows:
            return []
        question_tokens = set(tokenize(question))
        best_index = 0
        best_overlap = -1
        for i, name in enumerate(table.header):
            overlap = len(set(tokenize(name)) & question_tokens)
            if overlap > best_overlap:
                best_overlap = overlap
                best_index = i
        return [table.rows[0][best_index]]

    return ModelAdapter(name="first_row", answer=answer)


def mock_keyword_adapter(phrase: str, present: str = "yes",
                         absent: str = "no") -> ModelAdapter:
    """Prediction depends only on whether ``phrase`` occurs in the
    question; used to script prediction flips in annotation tests."""
    pattern = re.compile(rf"(?<!\w){re.escape(phrase.lower())}(?!\w)")

    def answer(table: Table, question: str) -> list[str]:
        return [present] if pattern.search(question.lower()) else [absent]

    return ModelAdapter(name=f"keyword:{phrase}", answer=answer)


def mock_constant_adapter(values: Sequence[str]) -> ModelAdapter:
    fixed = list(values)
    return ModelAdapter(name="constant", answer=lambda table, question: list(fixed))


def predictions_for_pairs(pairs: Iterable[PerturbedPair],
                          adapter: ModelAdapter) -> dict[tuple[str, str], list[str]]:
    """Run an adapter over both sides of every pair."""
    out: dict[tuple[str, str], list[str]] = {}
    for pair in pairs:
        out[(pair.id, "pre")] = adapter.answer(pair.pre.table, pair.pre.question)
        out[(pair.id, "post")] = adapter.answer(pair.post.table, pair.post.question)
    return out


def resolve_adapter(ref: str, dataset: Dataset | None = None) -> ModelAdapter:
    """Adapter lookup used by the CLI and the annotation service:
    "gold", "first_row", "keyword:<phrase>", or an http(s) endpoint."""
    if ref == "gold":
        if dataset is None:
            raise AdapterError("gold adapter needs a dataset")
        return mock_gold_adapter(dataset)
    if ref == "first_row":
        return mock_first_row_adapter()
    if ref.startswith("keyword:"):
        phrase = ref.split(":", 1)[1]
        if not phrase:
            raise AdapterError("keyword adapter needs a phrase")
        return mock_keyword_adapter(phrase)
    if ref.startswith("http://") or ref.startswith("https://"):
        return http_adapter(ref)
    raise AdapterError(f"unknown adapter {ref!r}")


__all__ = [
    "AdapterError", "ModelAdapter", "PredictionRecord", "QADemo",
    "build_qa_cot_prompt", "default_qa_demos", "http_adapter", "http_predict",
    "llm_qa_adapter", "load_predictions", "mock_constant_adapter",
    "mock_first_row_adapter", "mock_gold_adapter", "mock_keyword_adapter",
    "parse_qa_completion", "predictions_for_pairs", "resolve_adapter",
    "save_predictions",
]
