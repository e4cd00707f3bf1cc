"""Extract the (work, consumption) decision from a model reply."""

from __future__ import annotations

import ast
import json
import re
from decimal import ROUND_HALF_UP, Decimal

from macroabm.policies import PolicyDecision

GRID = Decimal("0.02")
_OBJECT = re.compile(r"\{[^{}]*\}")


class DecisionParseError(ValueError):
    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


def snap_to_grid(x: float) -> float:
    """Nearest multiple of 0.02, ties away from zero (decimal arithmetic, so 0.81 -> 0.82)."""
    steps = (Decimal(repr(float(x))) / GRID).quantize(Decimal(1), rounding=ROUND_HALF_UP)
    return float(steps * GRID)


def _load_object(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return None


def _number(obj: dict, key: str, raw: str) -> float:
    if key not in obj:
        raise DecisionParseError(f"missing key {key!r}", raw)
    value = obj[key]
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise DecisionParseError(f"{key!r} is not numeric: {value!r}", raw) from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DecisionParseError(f"{key!r} is not numeric: {value!r}", raw)
    if not 0.0 <= value <= 1.0:
        raise DecisionParseError(f"{key!r}={value} outside [0, 1]", raw)
    return snap_to_grid(value)


def parse_decision(response: str) -> PolicyDecision:
    for match in _OBJECT.finditer(response):
        obj = _load_object(match.group(0))
        if isinstance(obj, dict) and ("work" in obj or "consumption" in obj):
            return PolicyDecision(_number(obj, "work", response), _number(obj, "consumption", response))
    raise DecisionParseError("no decision object found in response", response)
