"""Pluggable text-completion backends.

Three interchangeable implementations sit behind one protocol:

* ScriptedBackend: an ordered rule list mapping prompt patterns to canned
  completions. Fully offline and deterministic; the benchmark gold runs and
  most tests use it.
* HttpChatBackend: a chat-completions HTTP client with bounded retries.
  The API key comes from the environment and is never printed.
* RecordReplayBackend: wraps another backend to capture completions into a
  cassette file, or serves a cassette back with no network at all.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx

ENV_API_KEY = "DATAAGENT_API_KEY"
ENV_API_KEY_FALLBACK = "OPENAI_API_KEY"
ENV_BASE_URL = "DATAAGENT_BASE_URL"
DEFAULT_BASE_URL = "https://api.openai.com"

SYSTEM_MESSAGE = "You are a careful data analyst. Reply only in the requested plan format."


class BackendError(Exception):
    pass


class AuthError(BackendError):
    """Rejected credentials; retrying would not help."""


class MatchFailure(BackendError):
    """No scripted rule (and no default) matched the prompt."""


class CassetteMiss(BackendError):
    """Replay requested for a prompt that was never recorded."""


class CassetteCorrupt(BackendError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"cassette line {line_no}: {reason}")


@dataclass(frozen=True)
class CompletionParams:
    model: str
    temperature: float = 0.0
    max_tokens: int = 1024

    def canonical_json(self) -> str:
        return json.dumps(
            {"max_tokens": self.max_tokens, "model": self.model, "temperature": self.temperature},
            sort_keys=True,
        )


class Backend(Protocol):
    def complete(self, prompt: str, params: CompletionParams) -> str: ...


@dataclass(frozen=True)
class ScriptRule:
    match: str
    response: str
    regex: bool = False

    def applies(self, prompt: str) -> bool:
        if self.regex:
            return re.search(self.match, prompt) is not None
        return self.match in prompt


class ScriptedBackend:
    """First matching rule wins; rule order is the priority order."""

    def __init__(self, rules: list[ScriptRule], default: str | None = None):
        self.rules = list(rules)
        self.default = default
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rules = [
            ScriptRule(r["match"], r["response"], bool(r.get("regex", False)))
            for r in data.get("rules", [])
        ]
        return cls(rules, data.get("default"))

    def complete(self, prompt: str, params: CompletionParams) -> str:
        self.calls += 1
        for rule in self.rules:
            if rule.applies(prompt):
                return rule.response
        if self.default is not None:
            return self.default
        raise MatchFailure(f"no rule matched prompt starting {prompt[:80]!r}")


def api_key_from_env() -> str:
    key = os.environ.get(ENV_API_KEY) or os.environ.get(ENV_API_KEY_FALLBACK)
    if not key:
        raise AuthError(f"no API key found; set {ENV_API_KEY}")
    return key


def base_url_from_env() -> str:
    return os.environ.get(ENV_BASE_URL, DEFAULT_BASE_URL)


class HttpChatBackend:
    """Chat-completions client: 3 attempts, doubling delay from 1 second.

    Timeouts, 429 and 5xx responses are retried; 401/403 raise AuthError
    immediately; any other status is a hard failure.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str,
        transport: httpx.BaseTransport | None = None,
        timeout: float = 30.0,
        max_attempts: int = 3,
        base_delay: float = 1.0,
    ):
        self.max_attempts = max_attempts
        self.base_delay = base_delay
        self._client = httpx.Client(
            base_url=base_url,
            transport=transport,
            timeout=timeout,
            headers={"Authorization": f"Bearer {api_key}"},
        )

    @classmethod
    def from_env(cls, transport: httpx.BaseTransport | None = None) -> "HttpChatBackend":
        return cls(base_url_from_env(), api_key_from_env(), transport=transport)

    def complete(self, prompt: str, params: CompletionParams) -> str:
        body = {
            "model": params.model,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
        }
        last_failure = "no attempts made"
        for attempt in range(1, self.max_attempts + 1):
            retriable, last_failure, completion = self._try_once(body)
            if completion is not None:
                return completion
            if not retriable:
                raise BackendError(last_failure)
            if attempt < self.max_attempts:
                time.sleep(self.base_delay * 2 ** (attempt - 1))
        raise BackendError(f"gave up after {self.max_attempts} attempts: {last_failure}")

    def _try_once(self, body: dict) -> tuple[bool, str, str | None]:
        try:
            response = self._client.post("/v1/chat/completions", json=body)
        except httpx.TimeoutException as exc:
            return True, f"timeout: {exc}", None
        if response.status_code in (401, 403):
            raise AuthError(f"credentials rejected (status {response.status_code})")
        if response.status_code == 429 or response.status_code >= 500:
            return True, f"status {response.status_code}", None
        if response.status_code != 200:
            return False, f"status {response.status_code}: {response.text[:200]}", None
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError):
            return False, "malformed completion response", None
        if not isinstance(content, str):
            return False, "completion content is not text", None
        return False, "", content


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"\\": "\\", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def _read_field(line: str, pos: int, line_no: int) -> tuple[str, int]:
    colon = line.find(":", pos)
    if colon < 0 or not line[pos:colon].isdigit():
        raise CassetteCorrupt(line_no, "missing length prefix")
    length = int(line[pos:colon])
    start = colon + 1
    end = start + length
    if end > len(line):
        raise CassetteCorrupt(line_no, "field shorter than its declared length")
    return line[start:end], end


def load_cassette(path: str | Path) -> dict[str, str]:
    """Map of prompt digest to completion; later records override earlier."""
    entries: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line:
            continue
        if not line.startswith("v1 "):
            raise CassetteCorrupt(line_no, "unknown record version")
        digest, pos = _read_field(line, 3, line_no)
        if line[pos : pos + 1] != " ":
            raise CassetteCorrupt(line_no, "missing separator after digest")
        _, pos = _read_field(line, pos + 1, line_no)
        if line[pos : pos + 1] != " ":
            raise CassetteCorrupt(line_no, "missing separator after params")
        completion, pos = _read_field(line, pos + 1, line_no)
        if pos != len(line):
            raise CassetteCorrupt(line_no, "trailing bytes after record")
        entries[digest] = _unescape(completion)
    return entries


def _record_line(prompt: str, params: CompletionParams, completion: str) -> str:
    fields = [prompt_digest(prompt), params.canonical_json(), _escape(completion)]
    return "v1 " + " ".join(f"{len(f)}:{f}" for f in fields)


class RecordReplayBackend:
    """mode='record' captures the inner backend; mode='replay' needs no inner."""

    def __init__(self, path: str | Path, inner: Backend | None = None, mode: str = "replay"):
        if mode not in ("record", "replay"):
            raise ValueError("mode must be 'record' or 'replay'")
        if mode == "record" and inner is None:
            raise ValueError("record mode needs an inner backend")
        self.path = Path(path)
        self.inner = inner
        self.mode = mode
        self._entries = load_cassette(self.path) if mode == "replay" else {}

    def complete(self, prompt: str, params: CompletionParams) -> str:
        digest = prompt_digest(prompt)
        if self.mode == "replay":
            if digest not in self._entries:
                raise CassetteMiss(f"no recording for prompt digest {digest[:12]}")
            return self._entries[digest]
        completion = self.inner.complete(prompt, params)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(_record_line(prompt, params, completion) + "\n")
        return completion


def record_replay(path: str | Path, inner: Backend | None = None, mode: str = "replay") -> RecordReplayBackend:
    return RecordReplayBackend(path, inner, mode)
