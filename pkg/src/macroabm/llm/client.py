"""Chat-completion clients: a live OpenAI-compatible HTTP client and a deterministic mock."""

from __future__ import annotations

import json
import logging
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import httpx

from macroabm.llm.prompts import REFLECTION_QUESTION

logger = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")


class ChatError(RuntimeError):
    pass


class ChatTransportError(ChatError):
    """The endpoint could not be reached (after retries)."""


class ChatProtocolError(ChatError):
    """The endpoint answered with something that is not a chat completion."""


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: list[dict]
    temperature: float = 0.0
    # routing hints for mocks and logs; never sent over the wire
    tags: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.messages:
            raise ValueError("chat request needs at least one message")
        if self.messages[0]["role"] not in ("system", "user"):
            raise ValueError("first message must come from the system or the user")
        for m in self.messages:
            if m.get("role") not in ROLES or not isinstance(m.get("content"), str):
                raise ValueError(f"malformed message: {m!r}")

    def to_wire(self) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": m["role"], "content": m["content"]} for m in self.messages],
            "temperature": self.temperature,
        }


@dataclass(frozen=True)
class ChatResponse:
    content: str


class ChatClient(Protocol):
    def chat(self, request: ChatRequest) -> ChatResponse: ...


def chat(client: ChatClient, request: ChatRequest) -> ChatResponse:
    return client.chat(request)


class HttpChatClient:
    """POSTs to an OpenAI-compatible ``/chat/completions`` endpoint.

    Transport errors, 429 and 5xx answers are retried with exponential
    backoff; anything else non-2xx is a protocol error.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self.endpoint = endpoint
        self.max_retries = max_retries
        self.backoff = backoff
        self._sleep = sleep
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def close(self) -> None:
        self._http.close()

    def chat(self, request: ChatRequest) -> ChatResponse:
        last: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._http.post(self.endpoint, json=request.to_wire())
            except httpx.TransportError as exc:
                last = exc
                logger.warning("chat attempt %d failed: %r", attempt + 1, exc)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = ChatTransportError(f"HTTP {resp.status_code}")
                logger.warning("chat attempt %d got HTTP %d", attempt + 1, resp.status_code)
                continue
            if resp.status_code >= 400:
                raise ChatProtocolError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            return ChatResponse(_first_choice(resp))
        raise ChatTransportError(f"chat failed after {self.max_retries + 1} attempts: {last!r}")


def _first_choice(resp: httpx.Response) -> str:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ChatProtocolError(f"malformed chat completion body: {resp.text[:200]}") from exc
    if not isinstance(content, str):
        raise ChatProtocolError("message content is not text")
    return content


# ---------------------------------------------------------------------------
# Mock
# ---------------------------------------------------------------------------

Responder = Callable[[ChatRequest], str]


class MockChatClient:
    """Deterministic stand-in for a live model.

    Looks up ``(agent_id, month)`` in a script first, then falls back to a
    responder function. Counts calls by kind.
    """

    def __init__(self, script: dict[tuple[int, int], str] | None = None, responder: Responder | None = None):
        self.script = dict(script or {})
        self.responder = responder
        self.calls: dict[str, int] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_jsonl(cls, path: str | Path, responder: Responder | None = None) -> "MockChatClient":
        script = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    script[(int(rec["agent_id"]), int(rec["month"]))] = rec["response"]
        return cls(script, responder)

    def chat(self, request: ChatRequest) -> ChatResponse:
        kind = request.tags.get("kind", "decision")
        with self._lock:
            self.calls[kind] = self.calls.get(kind, 0) + 1
        key = (request.tags.get("agent_id"), request.tags.get("month"))
        if kind == "decision" and key in self.script:
            return ChatResponse(self.script[key])
        if self.responder is None:
            raise ChatProtocolError(f"mock has no response for {key}")
        return ChatResponse(self.responder(request))


def constant_responder(work: float, consumption: float) -> Responder:
    def respond(request: ChatRequest) -> str:
        if request.messages[-1]["content"].endswith(REFLECTION_QUESTION):
            return "Nothing in the last quarter changes my plans."
        return json.dumps({"work": work, "consumption": consumption})

    return respond


_MONEY = r"\$(-?[0-9]+(?:\.[0-9]+)?)"
_INCOME = re.compile(r"(?:expected income will be|monthly salary of) " + _MONEY)
_SAVINGS = re.compile(r"savings account balance is " + _MONEY)


def econ_rational_responder(shock_keywords: tuple[str, ...] = ("national emergency",)) -> Responder:
    """A rule that answers decision prompts the way a cautious household might.

    It works harder right after losing its job, works less when it has a
    large savings cushion or when a shock sentence appears in the prompt,
    and spends less when the labor market is deflating.
    """

    def respond(request: ChatRequest) -> str:
        prompt = request.messages[-1]["content"]
        if prompt.endswith(REFLECTION_QUESTION):
            return _reflect(prompt)
        income = _grab(_INCOME, prompt)
        savings = _grab(_SAVINGS, prompt)
        cushion = savings / income if income and income > 0 else 0.0
        work = 0.96 - 0.03 * min(cushion, 6.0)
        if "became unemployed" in prompt:
            work += 0.1
        if any(k in prompt for k in shock_keywords):
            work -= 0.4
        consumption = 0.3
        if "deflation of the labor market" in prompt:
            consumption -= 0.06
        if "shortage of essential goods" in prompt:
            consumption += 0.04
        work = min(max(work, 0.0), 1.0)
        consumption = min(max(consumption, 0.0), 1.0)
        return f'Here is my decision: {{"work": {work:.2f}, "consumption": {consumption:.2f}}}'

    return respond


def _grab(pattern: re.Pattern, text: str) -> float | None:
    m = pattern.search(text)
    return float(m.group(1)) if m else None


def _reflect(prompt: str) -> str:
    labor = "deflation in the labor market" if "deflation of the labor market" in prompt else "a steady labor market"
    goods = "falling goods prices" if "price decrease" in prompt else "stable or rising goods prices"
    return f"Over the quarter I saw {labor} and {goods}. I will keep a savings buffer and spend carefully."
