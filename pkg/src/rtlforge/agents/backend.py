"""Chat-completion backends: HTTP endpoint and deterministic scripted replay."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from rtlforge.errors import RtlforgeError


class BackendUnavailable(RtlforgeError):
    pass


class ScriptExhausted(RtlforgeError):
    def __init__(self, agent: str, index: int):
        self.agent = agent
        self.index = index
        super().__init__(f"scripted backend has no response {index} for agent '{agent}'")


@dataclass(frozen=True)
class ChatExchange:
    messages: tuple[tuple[str, str], ...]   # (role, content)
    model_id: str = "default"
    temperature: float = 0.2

    def __post_init__(self):
        if not self.messages:
            raise ValueError("exchange requires at least one message")
        if self.messages[0][0] != "system":
            raise ValueError("first message must have the system role")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature outside [0, 2]")


def make_exchange(system: str, user: str, model_id: str = "default",
                  temperature: float = 0.2) -> ChatExchange:
    return ChatExchange((("system", system), ("user", user)), model_id, temperature)


class ChatBackend(Protocol):
    def complete(self, exchange: ChatExchange, *, agent: str, revision: int = 0) -> str:
        ...


def llm_complete(backend: ChatBackend, exchange: ChatExchange, *,
                 agent: str = "coder", revision: int = 0) -> str:
    """One assistant completion from the configured backend."""
    return backend.complete(exchange, agent=agent, revision=revision)


class ScriptedBackend:
    """Deterministic backend replaying canned responses per agent role.

    Responses are consumed in order; cursor position k answers the call
    carrying revision k, so a script file is a map from (agent role,
    revision) to response text.
    """

    def __init__(self, script: dict[str, list[str]]):
        self.script = {k: list(v) for k, v in script.items()}
        self.cursors: dict[str, int] = {}

    def complete(self, exchange: ChatExchange, *, agent: str, revision: int = 0) -> str:
        responses = self.script.get(agent, [])
        index = self.cursors.get(agent, 0)
        if index >= len(responses):
            raise ScriptExhausted(agent, index)
        self.cursors[agent] = index + 1
        return responses[index]


class ScriptBank:
    """A script file with optional per-triple and per-seed overlays.

    Flat form: {"articulator": [...], "hypothesis": [...], "coder": [...]}.
    Layered form adds "default", "by_triple": {id: roles}, "by_seed":
    {seed: roles}; overlays replace whole role lists.
    """

    ROLE_KEYS = ("articulator", "hypothesis", "coder", "dialectic")

    def __init__(self, data: dict):
        self.data = data

    @classmethod
    def load(cls, path: str | Path) -> "ScriptBank":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def roles(self, triple_id: str | None = None, seed: int | None = None) -> dict[str, list[str]]:
        merged: dict[str, list[str]] = {}

        def overlay(block: dict | None):
            if not block:
                return
            for key in self.ROLE_KEYS:
                if key in block:
                    merged[key] = list(block[key])

        flat = {k: v for k, v in self.data.items() if k in self.ROLE_KEYS}
        overlay(flat)
        overlay(self.data.get("default"))
        if seed is not None:
            overlay(self.data.get("by_seed", {}).get(str(seed)))
        if triple_id is not None:
            block = self.data.get("by_triple", {}).get(triple_id)
            overlay(block)
            if block and seed is not None:
                overlay(block.get("by_seed", {}).get(str(seed)))
        return merged

    def backend(self, triple_id: str | None = None, seed: int | None = None) -> ScriptedBackend:
        return ScriptedBackend(self.roles(triple_id, seed))


@dataclass
class HttpBackendConfig:
    endpoint: str
    model_id: str = "default"
    temperature: float = 0.2
    api_key_env: str = "RTLFORGE_API_KEY"
    max_retries: int = 3
    retry_delay: float = 0.5
    timeout: float = 120.0


class HttpBackend:
    """Chat-completions-style JSON endpoint with bounded retries."""

    RETRYABLE = {429, 500, 502, 503, 504}

    def __init__(self, config: HttpBackendConfig, client: httpx.Client | None = None):
        self.config = config
        self.client = client or httpx.Client(timeout=config.timeout)
        self.telemetry: dict[str, int] = field_default()

    def complete(self, exchange: ChatExchange, *, agent: str, revision: int = 0) -> str:
        payload = {
            "model": exchange.model_id if exchange.model_id != "default" else self.config.model_id,
            "messages": [{"role": r, "content": c} for r, c in exchange.messages],
            "temperature": exchange.temperature,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        retries = 0
        last_error = "no attempt made"
        for attempt in range(self.config.max_retries + 1):
            self.telemetry["requests"] += 1
            try:
                response = self.client.post(self.config.endpoint, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code == 200:
                    self.telemetry["last_retries"] = retries
                    try:
                        body = response.json()
                        return body["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, json.JSONDecodeError) as exc:
                        raise BackendUnavailable(f"malformed backend response: {exc}") from None
                if response.status_code not in self.RETRYABLE:
                    raise BackendUnavailable(
                        f"backend returned HTTP {response.status_code}")
                last_error = f"HTTP {response.status_code}"
            if attempt < self.config.max_retries:
                retries += 1
                self.telemetry["retries"] += 1
                if self.config.retry_delay:
                    time.sleep(self.config.retry_delay * (attempt + 1))
        self.telemetry["last_retries"] = retries
        raise BackendUnavailable(f"retries exhausted: {last_error}")


def field_default() -> dict[str, int]:
    return {"requests": 0, "retries": 0, "last_retries": 0}
