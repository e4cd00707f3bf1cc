from macroabm.llm.agent import LLMPolicy, build_decision_messages, make_client
from macroabm.llm.client import (
    ChatError,
    ChatProtocolError,
    ChatRequest,
    ChatResponse,
    ChatTransportError,
    HttpChatClient,
    MockChatClient,
    chat,
    constant_responder,
    econ_rational_responder,
)
from macroabm.llm.memory import Dialogue, MemoryPool, update_memory
from macroabm.llm.parse import DecisionParseError, parse_decision, snap_to_grid
from macroabm.llm.prompts import REFLECTION_QUESTION, PromptError, build_decision_prompt, build_reflection_prompt

__all__ = [
    "ChatError",
    "ChatProtocolError",
    "ChatRequest",
    "ChatResponse",
    "ChatTransportError",
    "DecisionParseError",
    "Dialogue",
    "HttpChatClient",
    "LLMPolicy",
    "MemoryPool",
    "MockChatClient",
    "PromptError",
    "REFLECTION_QUESTION",
    "build_decision_messages",
    "build_decision_prompt",
    "build_reflection_prompt",
    "chat",
    "constant_responder",
    "econ_rational_responder",
    "make_client",
    "parse_decision",
    "snap_to_grid",
    "update_memory",
]
