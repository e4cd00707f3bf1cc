"""Per-agent conversation memory: the last L monthly decisions plus the latest reflection."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Dialogue:
    month_index: int
    prompt_text: str
    response_text: str
    kind: str = "decision"  # or "reflection"

    def __post_init__(self):
        if not self.prompt_text:
            raise ValueError("dialogue prompt must not be empty")
        if self.kind not in ("decision", "reflection"):
            raise ValueError(f"unknown dialogue kind {self.kind!r}")


@dataclass
class MemoryPool:
    """Ordered oldest to newest.

    Accounting: each decision dialogue (prompt and answer) costs 2 units and
    the reflection costs 1, so the window never exceeds ``2L + 1``.
    """

    months: int = 1
    window: list[Dialogue] = field(default_factory=list)

    @property
    def capacity(self) -> int:
        return 2 * self.months + 1

    @property
    def size(self) -> int:
        return sum(2 if d.kind == "decision" else 1 for d in self.window)

    @property
    def reflection(self) -> Dialogue | None:
        return next((d for d in self.window if d.kind == "reflection"), None)

    def as_messages(self) -> list[dict]:
        messages = []
        for d in self.window:
            messages.append({"role": "user", "content": d.prompt_text})
            messages.append({"role": "assistant", "content": d.response_text})
        return messages


def update_memory(memory: MemoryPool, dialogue: Dialogue) -> MemoryPool:
    if dialogue.kind == "reflection":
        memory.window = [d for d in memory.window if d.kind != "reflection"]
        memory.window.append(dialogue)
        return memory
    memory.window.append(dialogue)
    decisions = [d for d in memory.window if d.kind == "decision"]
    excess = len(decisions) - memory.months
    if excess > 0:
        drop = {id(d) for d in decisions[:excess]}
        memory.window = [d for d in memory.window if id(d) not in drop]
    return memory
