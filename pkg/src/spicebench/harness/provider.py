"""LLM providers: a live chat-completion client and an offline replay stand-in.

ReplayProvider makes the whole pipeline runnable with zero network access: it
keys recorded responses by the SHA-256 of the prompt text and hands them out
in sequence, so n independent attempts against the same prompt consume
recordings 000, 001, ... in order. A missing recording raises ReplayMiss,
which the repair loop reports as a budget failure rather than a pass.
"""

from __future__ import annotations

import hashlib
import logging
import threading
import time
from pathlib import Path
from typing import Protocol

from ..errors import SpicebenchError

log = logging.getLogger(__name__)

_RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


class ProviderError(SpicebenchError):
    def __init__(self, status: int, excerpt: str):
        self.status = status
        self.excerpt = excerpt
        super().__init__(f"provider request failed (status {status}): {excerpt!r}")


class ReplayMiss(SpicebenchError):
    def __init__(self, digest: str):
        self.digest = digest
        super().__init__(f"no recorded response for prompt hash {digest}")


class Provider(Protocol):
    def generate(self, prompt: str) -> str: ...

    def identity(self) -> dict: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ReplayProvider:
    """Replays recorded responses from ``directory/<hash>/NNN.txt``."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._consumed: dict[str, int] = {}
        self._lock = threading.Lock()

    def generate(self, prompt: str) -> str:
        digest = prompt_hash(prompt)
        with self._lock:
            index = self._consumed.get(digest, 0)
            self._consumed[digest] = index + 1
        bucket = self.directory / digest
        recordings = sorted(bucket.glob("*.txt")) if bucket.is_dir() else []
        if index >= len(recordings):
            raise ReplayMiss(digest)
        return recordings[index].read_text()

    def identity(self) -> dict:
        return {"provider": "replay", "model": "replay"}

    def reset(self) -> None:
        with self._lock:
            self._consumed.clear()


def record_response(directory: str | Path, prompt: str, text: str) -> Path:
    """Append one recorded response for ``prompt``; returns the file written."""
    bucket = Path(directory) / prompt_hash(prompt)
    bucket.mkdir(parents=True, exist_ok=True)
    index = len(list(bucket.glob("*.txt")))
    path = bucket / f"{index:03d}.txt"
    path.write_text(text)
    return path


class HttpProvider:
    """Chat-completion client with bounded retries and exponential backoff.

    ``session`` only needs a ``post`` method, which keeps the transport
    injectable for tests; by default the requests library is used.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        temperature: float = 0.2,
        max_tokens: int = 2048,
        api_key: str | None = None,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        session=None,
    ):
        if session is None:
            import requests

            session = requests.Session()
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.api_key = api_key
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.session = session

    def identity(self) -> dict:
        return {
            "provider": "http",
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }

    def generate(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_status, last_excerpt = 0, "no request made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                delay = self.backoff * (2 ** (attempt - 1))
                log.info("retry %d/%d after %.1fs", attempt, self.max_retries, delay)
                time.sleep(delay)
            try:
                response = self.session.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
            except Exception as err:  # transport failure: retryable
                last_status, last_excerpt = 0, str(err)[:200]
                continue
            if response.status_code == 200:
                return self._extract_text(response)
            last_status = response.status_code
            last_excerpt = getattr(response, "text", "")[:200]
            if response.status_code not in _RETRYABLE_STATUSES:
                break
        raise ProviderError(last_status, last_excerpt)

    @staticmethod
    def _extract_text(response) -> str:
        try:
            blob = response.json()
            return blob["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as err:
            raise ProviderError(200, f"malformed completion payload: {err}") from err
