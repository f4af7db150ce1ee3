"""Application-level configuration shared by the service and the CLI.

The API credential is only ever read from the environment (DATAAGENT_API_KEY,
falling back to OPENAI_API_KEY); there is deliberately no flag or config
field for it, and it is never echoed back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .backends import (
    Backend,
    HttpChatBackend,
    RecordReplayBackend,
    ScriptedBackend,
    api_key_from_env,
    base_url_from_env,
)
from .checker import DEFAULT_MARGIN
from .planner import PlannerConfig

BACKEND_KINDS = ("scripted", "http", "replay")
DEFAULT_MODEL = "gpt-4o-mini"
DEFAULT_PORT = 8000


@dataclass(frozen=True)
class AppConfig:
    backend_kind: str = "scripted"
    script_path: Path | None = None
    cassette_path: Path | None = None
    model: str = DEFAULT_MODEL
    base_url: str | None = None
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    margin: float = DEFAULT_MARGIN
    port: int = DEFAULT_PORT


def build_backend(config: AppConfig) -> Backend:
    """Construct the configured backend; http reads its key from the env."""
    if config.backend_kind == "scripted":
        if config.script_path is not None:
            return ScriptedBackend.from_file(config.script_path)
        return ScriptedBackend([])
    if config.backend_kind == "replay":
        if config.cassette_path is None:
            raise ValueError("replay backend needs a cassette path")
        return RecordReplayBackend(config.cassette_path, mode="replay")
    if config.backend_kind == "http":
        return HttpChatBackend(config.base_url or base_url_from_env(), api_key_from_env())
    raise ValueError(f"unknown backend kind {config.backend_kind!r}")
