"""Text-generation backends behind one interface.

Three implementations: a deterministic mock (canned, hash-derived answers;
identical prompt always yields the identical response), a scripted backend
for tests, and an HTTP client for remote generation services speaking the
simple POST {prompt} -> {text} contract.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading
import time
from importlib import resources
from typing import Callable, Mapping, Protocol, Sequence, runtime_checkable

import httpx

from .errors import ResplanError
from .plans import render_plan


class BackendError(ResplanError):
    """A single generation attempt failed (transport or protocol)."""


class BackendFailure(ResplanError):
    """A generation call kept failing after its whole retry budget."""


@runtime_checkable
class GenerationBackend(Protocol):
    id: str
    max_prompt_tokens: int
    backoff_s: float
    # per-backend retry budget; None defers to the app-wide setting
    retries: int | None

    def generate(self, prompt: str) -> str:
        ...


def resolve_retries(backend: GenerationBackend, default: int) -> int:
    configured = getattr(backend, "retries", None)
    return default if configured is None else configured


def call_with_retries(backend: GenerationBackend, prompt: str, retries: int = 3) -> str:
    """Call the backend, retrying up to `retries` times after the first failure.

    Backoff is exponential starting at the backend's own backoff_s (zero for
    the mock, so tests never sleep).
    """
    attempts = 1 + max(0, retries)
    delay = getattr(backend, "backoff_s", 0.0)
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            return backend.generate(prompt)
        except BackendError as err:
            last = err
            if delay > 0 and attempt < attempts - 1:
                time.sleep(delay * (2**attempt))
    raise BackendFailure(
        f"backend {backend.id!r} failed after {retries} retries: {last}"
    )


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _hash_bits(seed: str, n: int) -> list[int]:
    bits: list[int] = []
    counter = 0
    while len(bits) < n:
        block = _digest(f"{seed}#{counter}")
        bits.extend(int(ch, 16) & 1 for ch in block)
        counter += 1
    return bits[:n]


def _canned_guideline_table() -> str:
    return (
        resources.files("resplan.data").joinpath("guideline_table.md").read_text("utf-8")
    )


_PLAN_CUE = re.compile(r"list of (\d+) binary digits")


class MockBackend:
    """Deterministic stand-in for a remote model.

    Responses are keyed off cue phrases in the prompt: plan requests get a
    short reasoning paragraph followed by a hash-derived binary vector,
    guideline-table requests get the canned scenario-action table, and
    everything else gets a small digest table. Every call is recorded in
    `prompts` so tests can assert call counts.
    """

    def __init__(
        self,
        id: str = "mock",
        max_prompt_tokens: int = 200_000,
        canned_table: str | None = None,
        retries: int | None = None,
    ):
        self.id = id
        self.max_prompt_tokens = max_prompt_tokens
        self.backoff_s = 0.0
        self.retries = retries
        self.prompts: list[str] = []
        self._table = canned_table if canned_table is not None else _canned_guideline_table()

    def generate(self, prompt: str) -> str:
        self.prompts.append(prompt)
        digest = _digest(prompt)[:12]
        plan = _PLAN_CUE.search(prompt)
        if plan:
            n = int(plan.group(1))
            bits = _hash_bits(prompt, n)
            return (
                "Assessment: the incident context points to a staged response; "
                "high-impact actions are engaged first, then supporting measures.\n"
                f"Context digest: {digest}.\n"
                f"Final action vector: {render_plan(bits)}\n"
            )
        lowered = prompt.lower()
        if "refine and filter" in lowered or "scenario-action table" in lowered:
            return self._table
        return (
            "| field | value |\n"
            "| --- | --- |\n"
            f"| digest | {digest} |\n"
            f"| tokens | {len(prompt.split())} |\n"
        )


class ScriptedBackend:
    """Test backend that replays a fixed sequence of responses.

    Entries may be strings, exceptions to raise, or callables applied to the
    prompt. Every prompt is recorded.
    """

    def __init__(
        self,
        responses: Sequence[str | Exception | Callable[[str], str]],
        id: str = "scripted",
        max_prompt_tokens: int = 200_000,
        retries: int | None = None,
    ):
        self.id = id
        self.max_prompt_tokens = max_prompt_tokens
        self.backoff_s = 0.0
        self.retries = retries
        self.prompts: list[str] = []
        self._responses = list(responses)
        self._cursor = 0

    def generate(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if self._cursor >= len(self._responses):
            raise AssertionError("scripted backend ran out of responses")
        entry = self._responses[self._cursor]
        self._cursor += 1
        if isinstance(entry, Exception):
            raise entry
        if callable(entry):
            return entry(prompt)
        return entry


class HttpBackend:
    """Client for a remote generation endpoint: POST {prompt} -> {text}.

    The in-flight semaphore is shared by every caller holding this instance,
    which is how a service enforces one global concurrency cap.
    """

    def __init__(
        self,
        id: str,
        endpoint: str,
        auth_token_env: str | None = None,
        timeout: float = 30.0,
        max_in_flight: int = 4,
        max_prompt_tokens: int = 120_000,
        backoff_s: float = 1.0,
        retries: int | None = None,
    ):
        self.id = id
        self.endpoint = endpoint
        self.auth_token_env = auth_token_env
        self.max_prompt_tokens = max_prompt_tokens
        self.backoff_s = backoff_s
        self.retries = retries
        self._client = httpx.Client(timeout=timeout)
        self._gate = threading.BoundedSemaphore(max_in_flight)

    def generate(self, prompt: str) -> str:
        headers = {}
        if self.auth_token_env:
            token = os.environ.get(self.auth_token_env)
            if token:
                headers["Authorization"] = f"Bearer {token}"
        with self._gate:
            try:
                response = self._client.post(
                    self.endpoint, json={"prompt": prompt}, headers=headers
                )
                response.raise_for_status()
                payload = response.json()
            except httpx.HTTPError as err:
                raise BackendError(str(err)) from err
        if not isinstance(payload, dict) or "text" not in payload:
            raise BackendError("backend response missing 'text' field")
        return str(payload["text"])


def backend_from_config(config: Mapping) -> GenerationBackend:
    """Build a backend from {kind, id, endpoint, auth_token_env, ...}."""
    kind = config.get("kind", "mock")
    retries = config.get("retries")
    if kind == "mock":
        return MockBackend(
            id=config.get("id", "mock"),
            max_prompt_tokens=int(config.get("max_prompt_tokens", 200_000)),
            retries=None if retries is None else int(retries),
        )
    if kind == "http":
        return HttpBackend(
            id=config.get("id", "http"),
            endpoint=config["endpoint"],
            auth_token_env=config.get("auth_token_env"),
            timeout=float(config.get("timeout", 30.0)),
            max_in_flight=int(config.get("max_in_flight", 4)),
            max_prompt_tokens=int(config.get("max_prompt_tokens", 120_000)),
            retries=None if retries is None else int(retries),
        )
    raise ValueError(f"unknown backend kind {kind!r}")
