"""Model-in-the-loop annotation backend.

An annotator walks a dataset one example at a time, sees the live
model's prediction on the original question, tries perturbed questions
until one flips the prediction, then accepts (persisting a pair) or
skips. Sessions append accepted pairs and cursor moves to a per-session
log so a crashed session can resume.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import urlparse

from .adapters import AdapterError, ModelAdapter, resolve_adapter
from .data import (Dataset, PerturbationSpec, PerturbedPair, QAExample,
                   load_dataset, pair_from_obj, pair_to_obj,
                   serialize_dataset, table_to_obj)
from .metrics import exact_match, predictions_equal

LEVEL_TYPES = {"word": "nlq_word", "sentence": "nlq_sentence"}


class SessionError(ValueError):
    """User-facing session failure with a machine-readable code."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class AttemptResult:
    prediction: tuple[str, ...]
    flipped: bool
    matches_gold: bool

    def to_obj(self) -> dict:
        return {"prediction": list(self.prediction), "flipped": self.flipped,
                "matches_gold": self.matches_gold}


def _norm_question(question: str) -> str:
    return " ".join(question.lower().split())


@dataclass
class _Attempt:
    question: str
    result: AttemptResult


class AnnotationSession:
    """Cursor over unannotated examples plus the accepted-pair store.

    Mutating calls are serialized by a lock; each example is served at
    most once per pass.
    """

    def __init__(self, dataset: Dataset, adapter: ModelAdapter, level: str,
                 require_flip: bool = True, show_gold: bool = True,
                 store_path: str | None = None, session_id: str | None = None):
        if level not in LEVEL_TYPES:
            raise SessionError("bad_level", f"level must be word or sentence, got {level!r}")
        self.session_id = session_id or uuid.uuid4().hex
        self.dataset = dataset
        self.adapter = adapter
        self.level = level
        self.require_flip = require_flip
        self.show_gold = show_gold
        self._store_path = store_path
        self._lock = threading.Lock()
        self._cursor = 0
        self._orig_predictions: dict[str, list[str]] = {}
        self._attempts: dict[str, list[_Attempt]] = {}
        self._accepted: list[PerturbedPair] = []
        if store_path and os.path.exists(store_path):
            self._replay(store_path)

    # -- persistence ----------------------------------------------------------

    def _replay(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["event"] == "accept":
                    self._accepted.append(pair_from_obj(event["pair"]))
                    self._cursor = max(self._cursor, event["cursor"])
                elif event["event"] == "skip":
                    self._cursor = max(self._cursor, event["cursor"])

    def _log(self, event: dict) -> None:
        if not self._store_path:
            return
        with open(self._store_path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")

    # -- workflow --------------------------------------------------------------

    def _current(self) -> QAExample | None:
        if self._cursor >= len(self.dataset.examples):
            return None
        example = self.dataset.examples[self._cursor]
        if isinstance(example, PerturbedPair):
            raise SessionError("bad_dataset", "annotation sessions need example records")
        return example

    def _original_prediction(self, example: QAExample) -> list[str]:
        if example.id not in self._orig_predictions:
            self._orig_predictions[example.id] = list(
                self.adapter.answer(example.table, example.question)
            )
        return self._orig_predictions[example.id]

    def next_item(self) -> dict:
        """The next unserved example with the model's original
        prediction; idempotent until accept/skip advances the cursor."""
        with self._lock:
            example = self._current()
            if example is None:
                return {"done": True, "accepted_count": len(self._accepted)}
            prediction = self._original_prediction(example)
            item: dict[str, Any] = {
                "item_id": example.id,
                "question": example.question,
                "table": table_to_obj(example.table),
                "original_prediction": prediction,
                "position": self._cursor,
                "total": len(self.dataset.examples),
                "accepted_count": len(self._accepted),
                "require_flip": self.require_flip,
            }
            if self.show_gold:
                item["gold_answers"] = list(example.answers)
            return item

    def _served_example(self, item_id: str) -> QAExample:
        example = self._current()
        if example is None or example.id != item_id:
            raise SessionError("unknown_item", f"item {item_id!r} is not currently served")
        return example

    def submit_attempt(self, item_id: str, perturbed_question: str) -> AttemptResult:
        """Run the model on (original table, perturbed question) and
        report whether the prediction flipped. Attempts are unlimited
        and persist nothing."""
        with self._lock:
            example = self._served_example(item_id)
            if _norm_question(perturbed_question) == _norm_question(example.question):
                raise SessionError("unchanged", "perturbed question equals the original")
            prediction = list(self.adapter.answer(example.table, perturbed_question))
            original = self._original_prediction(example)
            result = AttemptResult(
                prediction=tuple(prediction),
                flipped=not predictions_equal(prediction, original),
                matches_gold=bool(prediction)
                and exact_match(prediction, list(example.answers)),
            )
            self._attempts.setdefault(item_id, []).append(
                _Attempt(question=perturbed_question, result=result)
            )
            return result

    def accept(self, item_id: str, perturbed_question: str) -> PerturbedPair:
        """Persist a pair for a previously attempted question and
        advance the cursor."""
        with self._lock:
            example = self._served_example(item_id)
            attempts = self._attempts.get(item_id, [])
            matching = [a for a in attempts if a.question == perturbed_question]
            if not matching:
                raise SessionError("no_attempt", "accept requires a prior attempt"
                                                 " with this question")
            if self.require_flip and not matching[-1].result.flipped:
                raise SessionError("not_flipped", "session requires a"
                                                  " prediction-flipping attempt")
            spec = PerturbationSpec(
                level="nlq", type=LEVEL_TYPES[self.level], seed=0,
                params={"flipped": matching[-1].result.flipped},
            )
            pair = PerturbedPair(
                id=example.id, spec=spec, pre=example,
                post=example.replace(question=perturbed_question),
                provenance="human",
            )
            self._accepted.append(pair)
            self._cursor += 1
            self._log({"event": "accept", "cursor": self._cursor,
                       "pair": pair_to_obj(pair)})
            return pair

    def skip(self, item_id: str) -> None:
        with self._lock:
            self._served_example(item_id)
            self._cursor += 1
            self._log({"event": "skip", "cursor": self._cursor})

    def export(self) -> bytes:
        """Accepted pairs, in acceptance order, as pair JSONL."""
        with self._lock:
            return serialize_dataset(Dataset(self.session_id, self._accepted))

    def accepted_pairs(self) -> list[PerturbedPair]:
        with self._lock:
            return list(self._accepted)


# --- service and HTTP layer ----------------------------------------------------

@dataclass
class AnnotationService:
    """Holds live sessions; safe for concurrent use across sessions."""

    store_dir: str | None = None
    _sessions: dict[str, AnnotationSession] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def create_session(self, dataset_path: str, adapter_ref: str, level: str,
                       require_flip: bool = True, show_gold: bool = True) -> str:
        try:
            dataset = load_dataset(dataset_path, kind="examples")
        except OSError as err:
            raise SessionError("bad_dataset", f"cannot read dataset: {err}") from err
        try:
            adapter = resolve_adapter(adapter_ref, dataset)
        except AdapterError as err:
            raise SessionError("bad_adapter", str(err)) from err
        session_id = uuid.uuid4().hex
        store_path = None
        if self.store_dir:
            os.makedirs(self.store_dir, exist_ok=True)
            store_path = os.path.join(self.store_dir, f"{session_id}.jsonl")
        session = AnnotationSession(
            dataset=dataset, adapter=adapter, level=level,
            require_flip=require_flip, show_gold=show_gold,
            store_path=store_path, session_id=session_id,
        )
        with self._lock:
            self._sessions[session_id] = session
        return session_id

    def get(self, session_id: str) -> AnnotationSession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionError("not_found", f"no session {session_id!r}")
        return session


def _error_status(code: str) -> int:
    return {
        "not_found": 404,
        "unknown_item": 409,
        "unchanged": 422,
        "no_attempt": 409,
        "not_flipped": 409,
        "internal": 500,
        "adapter_error": 502,
    }.get(code, 400)


class _Handler(BaseHTTPRequestHandler):
    service: AnnotationService  # set by make_server

    def log_message(self, *args):  # quiet by default
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, status: int, payload: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)

    def _fail(self, code: str, message: str) -> None:
        self._send_json(_error_status(code), {"code": code, "message": message})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise SessionError("bad_request", "body must be a JSON object") from None
        if not isinstance(obj, dict):
            raise SessionError("bad_request", "body must be a JSON object")
        return obj

    def do_OPTIONS(self):  # CORS preflight for the browser client
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        try:
            parts = [p for p in urlparse(self.path).path.split("/") if p]
            if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "next":
                session = self.service.get(parts[1])
                self._send_json(200, session.next_item())
            elif len(parts) == 3 and parts[0] == "sessions" and parts[2] == "export":
                session = self.service.get(parts[1])
                self._send_bytes(200, session.export(),
                                 "application/x-ndjson; charset=utf-8")
            else:
                self._fail("not_found", f"no route for GET {self.path}")
        except SessionError as err:
            self._fail(err.code, str(err))
        except Exception as err:  # noqa: BLE001 - surfaced as a 500 payload
            self._fail("internal", f"{type(err).__name__}: {err}")

    def do_POST(self):
        try:
            parts = [p for p in urlparse(self.path).path.split("/") if p]
            body = self._read_body()
            if parts == ["sessions"]:
                for key in ("dataset", "adapter", "level"):
                    if key not in body:
                        raise SessionError("bad_request", f"missing field {key!r}")
                session_id = self.service.create_session(
                    dataset_path=body["dataset"], adapter_ref=body["adapter"],
                    level=body["level"],
                    require_flip=bool(body.get("require_flip", True)),
                    show_gold=bool(body.get("show_gold", True)),
                )
                self._send_json(200, {"session_id": session_id})
            elif len(parts) == 3 and parts[0] == "sessions":
                session = self.service.get(parts[1])
                if parts[2] == "attempt":
                    result = session.submit_attempt(body.get("item_id", ""),
                                                    body.get("question", ""))
                    self._send_json(200, result.to_obj())
                elif parts[2] == "accept":
                    pair = session.accept(body.get("item_id", ""),
                                          body.get("question", ""))
                    self._send_json(200, {"accepted": True, "item_id": pair.id,
                                          "accepted_count":
                                          len(session.accepted_pairs())})
                elif parts[2] == "skip":
                    session.skip(body.get("item_id", ""))
                    self._send_json(200, {"skipped": True})
                else:
                    self._fail("not_found", f"no route for POST {self.path}")
            else:
                self._fail("not_found", f"no route for POST {self.path}")
        except SessionError as err:
            self._fail(err.code, str(err))
        except AdapterError as err:
            self._fail("adapter_error", str(err))
        except Exception as err:  # noqa: BLE001 - surfaced as a 500 payload
            self._fail("internal", f"{type(err).__name__}: {err}")


def make_server(host: str = "127.0.0.1", port: int = 8008,
                store_dir: str | None = None) -> ThreadingHTTPServer:
    service = AnnotationService(store_dir=store_dir)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    server.service = service  # type: ignore[attr-defined]
    return server


def serve_forever(host: str, port: int, store_dir: str | None = None) -> None:
    server = make_server(host, port, store_dir)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
