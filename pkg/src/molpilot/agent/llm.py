"""Chat-completion client.

Provider-agnostic: POSTs a model name and a (role, content) message list
to a configurable endpoint, authenticating with a bearer token read from
a named environment variable, and extracts the first choice's text.  A
canned client stands in for tests; fallback-policy runs construct no
client at all.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Protocol


class LlmError(RuntimeError):
    pass


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str
    model: str = "default"
    token_env: str = "MOLPILOT_LLM_TOKEN"
    timeout_s: float = 60.0
    max_tokens: int = 1024
    temperature: float = 0.0


class ChatClient(Protocol):
    def complete(self, messages: list[dict]) -> str: ...


class HttpChatClient:
    def __init__(self, config: LlmConfig):
        self.config = config

    def complete(self, messages: list[dict]) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = {
            "model": self.config.model,
            "messages": messages,
            "max_tokens": self.config.max_tokens,
            "temperature": self.config.temperature,
        }
        try:
            response = requests.post(self.config.endpoint, json=body,
                                     headers=headers, timeout=self.config.timeout_s)
        except requests.RequestException as exc:
            raise LlmError(f"chat endpoint unreachable: {exc}") from exc
        if response.status_code != 200:
            raise LlmError(f"chat endpoint returned {response.status_code}: "
                           f"{response.text[:500]}")
        try:
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise LlmError(f"malformed chat response: {exc}") from exc


@dataclass
class CannedClient:
    """Scripted replies for tests; records every prompt it receives."""

    replies: list[str] = field(default_factory=list)
    prompts: list[list[dict]] = field(default_factory=list)
    calls: int = 0

    def complete(self, messages: list[dict]) -> str:
        self.prompts.append(messages)
        self.calls += 1
        if not self.replies:
            raise LlmError("canned client exhausted")
        return self.replies.pop(0)
