"""Chat-completion gateways: an OpenAI-compatible HTTP client and a
deterministic scripted mock sharing one call contract.

Both implementations bound the number of in-flight requests; callers that
need byte-reproducible runs use the mock with its default limit of 1.
"""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import requests

log = logging.getLogger(__name__)

API_KEY_ENV = "PROMPTFORGE_API_KEY"


class GatewayError(Exception):
    """Base failure talking to a chat endpoint."""


class AuthenticationError(GatewayError):
    pass


class RateLimitExhausted(GatewayError):
    pass


class MalformedResponseError(GatewayError):
    pass


class MockScriptExhausted(GatewayError):
    pass


@dataclass(frozen=True)
class ChatRequest:
    model_name: str
    user_text: str
    system_text: str | None = None
    temperature: float = 1.0
    max_output_tokens: int = 1024

    def __post_init__(self):
        if not self.user_text:
            raise ValueError("user_text must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True)
class ChatResponse:
    text: str
    prompt_token_estimate: int
    latency: float


def estimate_tokens(text: str) -> int:
    """Deterministic upper estimate: ceil(len(text) / 3).

    Deliberately a character heuristic, not a model tokenizer: budget
    enforcement only needs a conservative, model-agnostic bound.
    """
    return (len(text) + 2) // 3


class ChatGateway(Protocol):
    max_in_flight: int

    def complete(self, request: ChatRequest) -> ChatResponse: ...


@dataclass(frozen=True)
class RetryPolicy:
    """Exponential backoff for transient failures: delays 1s, 2s, 4s by default."""

    retries: int = 3
    base_delay: float = 1.0
    factor: float = 2.0
    jitter: float = 0.25

    def delay(self, attempt: int, rng: random.Random) -> float:
        raw = self.base_delay * self.factor ** attempt
        return raw * (1.0 + rng.uniform(0, self.jitter))


def _request_tokens(request: ChatRequest) -> int:
    return estimate_tokens((request.system_text or "") + request.user_text)


class HttpChatGateway:
    """POSTs to <base_url>/chat/completions with a bearer credential.

    Transient failures (connection errors, HTTP 429 and 5xx) are retried
    per the policy; other 4xx responses fail immediately. 429 is the one
    4xx treated as transient, since rate limits clear on their own.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        timeout: float = 120.0,
        retry: RetryPolicy = RetryPolicy(),
        max_in_flight: int = 4,
        sleep=time.sleep,
    ):
        key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        if not key:
            raise AuthenticationError(
                f"no API credential: pass api_key or set {API_KEY_ENV}"
            )
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retry = retry
        self.max_in_flight = max_in_flight
        self._key = key
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._rng = random.Random()

    def complete(self, request: ChatRequest) -> ChatResponse:
        messages = []
        if request.system_text is not None:
            messages.append({"role": "system", "content": request.system_text})
        messages.append({"role": "user", "content": request.user_text})
        payload = {
            "model": request.model_name,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self._key}"}
        url = f"{self.base_url}/chat/completions"

        started = time.monotonic()
        last_error: Exception | None = None
        rate_limited = False
        with self._slots:
            for attempt in range(self.retry.retries + 1):
                if attempt:
                    self._sleep(self.retry.delay(attempt - 1, self._rng))
                try:
                    resp = requests.post(url, json=payload, headers=headers,
                                         timeout=self.timeout)
                except requests.RequestException as exc:
                    last_error = exc
                    log.warning("transport failure (attempt %d): %s", attempt + 1, exc)
                    continue
                if resp.status_code in (401, 403):
                    raise AuthenticationError(f"endpoint rejected credential: HTTP {resp.status_code}")
                if resp.status_code == 429:
                    rate_limited = True
                    last_error = GatewayError("HTTP 429")
                    log.warning("rate limited (attempt %d)", attempt + 1)
                    continue
                if resp.status_code >= 500:
                    last_error = GatewayError(f"HTTP {resp.status_code}")
                    log.warning("server error %d (attempt %d)", resp.status_code, attempt + 1)
                    continue
                if resp.status_code != 200:
                    raise GatewayError(f"HTTP {resp.status_code}: {resp.text[:200]}")
                return self._parse(resp, request, started)
        if rate_limited:
            raise RateLimitExhausted(f"rate limited after {self.retry.retries + 1} attempts")
        raise GatewayError(f"transport failed after {self.retry.retries + 1} attempts: {last_error}")

    def _parse(self, resp, request: ChatRequest, started: float) -> ChatResponse:
        try:
            body = resp.json()
        except ValueError as exc:
            raise MalformedResponseError(f"endpoint returned non-JSON body: {exc}") from exc
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected response shape: {exc!r}") from exc
        if not isinstance(text, str):
            raise MalformedResponseError("message content is not a string")
        return ChatResponse(
            text=text,
            prompt_token_estimate=_request_tokens(request),
            latency=time.monotonic() - started,
        )


class ScriptedChatGateway:
    """Replays a fixed list of responses in order, ignoring request content.

    Script consumption is serialized under a lock so response order stays
    deterministic even if callers overlap; deterministic tests should keep
    max_in_flight at 1 regardless.
    """

    def __init__(self, responses: Sequence[str], max_in_flight: int = 1):
        self._responses = list(responses)
        self._next = 0
        self._lock = threading.Lock()
        self.max_in_flight = max_in_flight

    @classmethod
    def from_file(cls, path: str | Path, max_in_flight: int = 1) -> "ScriptedChatGateway":
        """Load a script: newline-delimited JSON records {"response": str}."""
        path = Path(path)
        if not path.is_file():
            raise GatewayError(f"{path}: no such mock script")
        responses = []
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise GatewayError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
                if not isinstance(obj, dict) or not isinstance(obj.get("response"), str):
                    raise GatewayError(f"{path}:{lineno}: expected {{\"response\": string}}")
                responses.append(obj["response"])
        return cls(responses, max_in_flight=max_in_flight)

    @property
    def consumed(self) -> int:
        return self._next

    @property
    def remaining(self) -> int:
        return len(self._responses) - self._next

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            if self._next >= len(self._responses):
                raise MockScriptExhausted("mock script exhausted")
            text = self._responses[self._next]
            self._next += 1
        return ChatResponse(text=text, prompt_token_estimate=_request_tokens(request),
                            latency=0.0)
