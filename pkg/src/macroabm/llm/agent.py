"""The LLM-backed household policy: prompt, ask, parse, remember, reflect."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor

from macroabm.core import AgentState, LLMConfig
from macroabm.llm.client import (
    ChatClient,
    ChatRequest,
    HttpChatClient,
    MockChatClient,
    constant_responder,
    econ_rational_responder,
)
from macroabm.llm.memory import Dialogue, MemoryPool, update_memory
from macroabm.llm.parse import DecisionParseError, parse_decision
from macroabm.llm.prompts import build_decision_prompt, build_reflection_prompt
from macroabm.policies import EconObservation, Policy, PolicyDecision

logger = logging.getLogger(__name__)

FIRST_MONTH_FALLBACK = PolicyDecision(0.5, 0.5)


def build_decision_messages(agent: AgentState, obs: EconObservation, memory: MemoryPool) -> list[dict]:
    return memory.as_messages() + [{"role": "user", "content": build_decision_prompt(agent, obs)}]


def make_client(config: LLMConfig) -> ChatClient:
    if config.client == "http":
        return HttpChatClient(
            config.endpoint,
            api_key=os.environ.get(config.api_key_env),
            timeout=config.timeout,
            max_retries=config.max_retries,
        )
    mock = config.mock
    if mock.responder == "constant":
        responder = constant_responder(mock.work, mock.consumption)
    elif mock.responder == "script":
        responder = None  # every (agent, month) must be scripted
    else:
        responder = econ_rational_responder(tuple(mock.shock_keywords))
    if mock.script:
        return MockChatClient.from_jsonl(mock.script, responder)
    return MockChatClient(responder=responder)


class LLMPolicy(Policy):
    """One chat per agent per month, one reflection chat per agent per quarter end."""

    name = "LLM"

    def __init__(self, client: ChatClient, config: LLMConfig | None = None):
        self.client = client
        self.config = config or LLMConfig()
        self.memories: dict[int, MemoryPool] = {}
        self.quarter: dict[int, list[Dialogue]] = {}
        self.last_decision: dict[int, PolicyDecision] = {}
        self.dialogue_log: list[dict] = []
        self.chat_counts = {"decision": 0, "reflection": 0}
        self.fallback_count = 0
        self.max_memory_size = 0

    def _memory(self, agent_id: int) -> MemoryPool:
        if agent_id not in self.memories:
            self.memories[agent_id] = MemoryPool(months=self.config.memory_months)
        return self.memories[agent_id]

    def _map(self, fn, items):
        if self.config.parallelism > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.config.parallelism) as pool:
                return list(pool.map(fn, items))
        return [fn(x) for x in items]

    def _ask(self, agent: AgentState, messages: list[dict], month: int, kind: str) -> str:
        request = ChatRequest(
            model=self.config.model,
            messages=messages,
            temperature=self.config.temperature,
            tags={"agent_id": agent.id, "month": month, "kind": kind},
        )
        return self.client.chat(request).content

    def _decide_one(self, pair):
        agent, obs = pair
        messages = build_decision_messages(agent, obs, self._memory(agent.id))
        prompt = messages[-1]["content"]
        attempts = []
        for _ in range(self.config.parse_retries + 1):
            text = self._ask(agent, messages, obs.month_index, "decision")
            attempts.append(text)
            try:
                return prompt, text, parse_decision(text), attempts
            except DecisionParseError as exc:
                logger.info("agent %d month %d: unparseable reply (%s)", agent.id, obs.month_index, exc)
        return prompt, attempts[-1], None, attempts

    def decide(self, agents, observations):
        results = self._map(self._decide_one, list(zip(agents, observations)))
        decisions = []
        for agent, obs, (prompt, text, decision, attempts) in zip(agents, observations, results):
            self.chat_counts["decision"] += len(attempts)
            for t in attempts:
                self.dialogue_log.append(
                    {"agent_id": agent.id, "month": obs.month_index, "kind": "decision", "prompt": prompt, "response": t}
                )
            if decision is None:
                self.fallback_count += 1
                decision = self.last_decision.get(agent.id, FIRST_MONTH_FALLBACK)
            self.last_decision[agent.id] = decision
            dialogue = Dialogue(obs.month_index, prompt, text, "decision")
            update_memory(self._memory(agent.id), dialogue)
            self.quarter.setdefault(agent.id, []).append(dialogue)
            self._track(agent.id)
            decisions.append(decision)
        return decisions

    def end_of_month(self, month_index, agents):
        if (month_index + 1) % 3 != 0:
            return
        ready = [a for a in agents if len(self.quarter.get(a.id, ())) == 3]

        def reflect(agent):
            prompt = build_reflection_prompt(self.quarter[agent.id])
            return prompt, self._ask(agent, [{"role": "user", "content": prompt}], month_index, "reflection")

        for agent, (prompt, text) in zip(ready, self._map(reflect, ready)):
            self.chat_counts["reflection"] += 1
            self.dialogue_log.append(
                {"agent_id": agent.id, "month": month_index, "kind": "reflection", "prompt": prompt, "response": text}
            )
            update_memory(self._memory(agent.id), Dialogue(month_index, prompt, text, "reflection"))
            self._track(agent.id)
        self.quarter = {}

    def _track(self, agent_id: int) -> None:
        self.max_memory_size = max(self.max_memory_size, self.memories[agent_id].size)
