"""Text-completion client contract plus the fixture-backed test double.

Live access goes through a minimal HTTP client configured by the
LLM_API_BASE / LLM_API_KEY environment variables. The test suite never
touches the network: completions are replayed from fixture files of
{prompt_hash, response_text} JSONL records.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass

API_KEY_VAR = "LLM_API_KEY"
API_BASE_VAR = "LLM_API_BASE"


class LlmError(RuntimeError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = 0.7
    max_tokens: int = 256
    model: str | None = None


class LlmClient:
    """Completion interface; implementations must be safe for
    concurrent complete() calls."""

    def complete(self, request: CompletionRequest) -> str:
        raise NotImplementedError


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class FixtureClient(LlmClient):
    """Replays canned responses keyed by prompt hash. Identical
    requests always return identical text."""

    def __init__(self, responses: dict[str, str]):
        self._responses = dict(responses)

    @classmethod
    def from_file(cls, path: str) -> "FixtureClient":
        responses: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    responses[obj["prompt_hash"]] = obj["response_text"]
                except (json.JSONDecodeError, KeyError, TypeError) as err:
                    raise LlmError(f"{path}:{lineno}: bad fixture record ({err})") from None
        return cls(responses)

    def complete(self, request: CompletionRequest) -> str:
        key = prompt_hash(request.prompt)
        if key not in self._responses:
            raise LlmError(f"no fixture response for prompt hash {key[:12]}...")
        return self._responses[key]


class RecordingClient(LlmClient):
    """Wraps a live client and appends every completion to a fixture
    file, so live runs become replayable."""

    def __init__(self, inner: LlmClient, path: str):
        self._inner = inner
        self._path = path
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        text = self._inner.complete(request)
        record = json.dumps(
            {"prompt_hash": prompt_hash(request.prompt), "response_text": text},
            ensure_ascii=False,
        )
        with self._lock, open(self._path, "a", encoding="utf-8") as handle:
            handle.write(record + "\n")
        return text


class HttpClient(LlmClient):
    """POSTs {prompt, temperature, max_tokens[, model]} to
    <base>/completions and reads {text} back. In-flight requests are
    bounded and transport failures get a bounded retry (requests are
    idempotent: same prompt, same cache key in fixture mode)."""

    def __init__(self, base: str | None = None, api_key: str | None = None,
                 timeout: float = 60.0, max_in_flight: int = 4, retries: int = 2):
        base = base or os.environ.get(API_BASE_VAR)
        api_key = api_key or os.environ.get(API_KEY_VAR)
        if not base:
            raise LlmError(f"{API_BASE_VAR} is not set")
        if not api_key:
            raise LlmError(f"{API_KEY_VAR} is not set")
        self._base = base.rstrip("/")
        self._api_key = api_key
        self._timeout = timeout
        self._retries = retries
        self._semaphore = threading.Semaphore(max_in_flight)

    def complete(self, request: CompletionRequest) -> str:
        import requests

        body = {
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.model:
            body["model"] = request.model
        last_error: Exception | None = None
        for attempt in range(self._retries + 1):
            with self._semaphore:
                try:
                    response = requests.post(
                        f"{self._base}/completions",
                        json=body,
                        headers={"Authorization": f"Bearer {self._api_key}"},
                        timeout=self._timeout,
                    )
                except requests.RequestException as err:
                    last_error = err
                    continue
            if response.status_code // 100 == 5 and attempt < self._retries:
                last_error = LlmError(f"completion endpoint returned"
                                      f" {response.status_code}")
                continue
            if response.status_code // 100 != 2:
                raise LlmError(f"completion endpoint returned {response.status_code}")
            try:
                return response.json()["text"]
            except (ValueError, KeyError) as err:
                raise LlmError(f"malformed completion response: {err}") from None
        raise LlmError(f"transport failure after {self._retries + 1} attempts:"
                       f" {last_error}")


class ScriptedClient(LlmClient):
    """Returns scripted responses in order; cycles when exhausted.
    Intended for unit tests that do not care about prompt content."""

    def __init__(self, responses: list[str]):
        if not responses:
            raise ValueError("need at least one scripted response")
        self._responses = list(responses)
        self._calls = 0
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            text = self._responses[self._calls % len(self._responses)]
            self._calls += 1
        return text
