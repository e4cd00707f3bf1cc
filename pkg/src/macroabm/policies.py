"""Household decision policies: the rule-based baselines, scripted policies and
the Bernoulli labor draw.

Every policy maps one :class:`EconObservation` per agent to a
:class:`PolicyDecision`. The LLM-backed policy lives in :mod:`macroabm.llm`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from macroabm.core import AgentState, TaxSchedule


@dataclass(frozen=True)
class PolicyDecision:
    work_propensity: float
    consumption_propensity: float

    def __post_init__(self):
        object.__setattr__(self, "work_propensity", clamp01(self.work_propensity))
        object.__setattr__(self, "consumption_propensity", clamp01(self.consumption_propensity))


@dataclass(frozen=True)
class RulePolicyParams:
    beta: float = 0.1
    gamma: float = 0.1
    h: float = 1.0
    epsilon_savings: float = 1e-6


@dataclass(frozen=True)
class EconObservation:
    """What one agent sees when deciding for the month.

    The first block is the regression variable set; the rest is context used
    by prompts and scripted rules.
    """

    expected_income: float
    savings: float
    prev_consumption: float
    prev_tax: float
    prev_redistribution: float
    price: float
    interest_rate: float

    month_index: int = 0
    date: tuple[int, int] = (2001, 1)
    employed_last_month: bool | None = None
    tax_schedule: TaxSchedule = field(default_factory=TaxSchedule)
    interventions: tuple[str, ...] = ()
    prev_expected_income: float | None = None
    prev_price: float | None = None
    shortage_last_month: bool = False
    unemployment_last_month: float = 0.0
    trailing_unemployment: float = 0.0

    def regressors(self) -> tuple[float, ...]:
        return (
            self.expected_income,
            self.prev_consumption,
            self.prev_tax,
            self.prev_redistribution,
            self.price,
            self.savings,
            self.interest_rate,
        )


def clamp01(x: float) -> float:
    x = float(x)
    if not x >= 0.0:  # also maps NaN to 0
        return 0.0
    return 1.0 if x > 1.0 else x


# ---------------------------------------------------------------------------
# Decision rules
# ---------------------------------------------------------------------------


def len_consumption_raw(obs: EconObservation, params: RulePolicyParams) -> float:
    wealth = obs.savings + obs.expected_income
    if wealth <= 0:
        return float("inf")
    return (obs.price / wealth) ** params.beta


def len_consumption(obs: EconObservation, params: RulePolicyParams) -> float:
    """Memory-based rule: spend more when the price is high relative to wealth."""
    return clamp01(len_consumption_raw(obs, params))


def cats_fraction(obs: EconObservation, params: RulePolicyParams) -> float:
    """Share ``c`` of current income that keeps next month's savings/income at ``h``.

    Solves ``(1 + r)(s + (1 - c) z) / z = h`` for ``c``; unclamped.
    """
    s, z, r = obs.savings, obs.expected_income, obs.interest_rate
    return 1.0 + s / z - params.h / (1.0 + r)


def cats_consumption(obs: EconObservation, params: RulePolicyParams) -> float:
    s, z = obs.savings, obs.expected_income
    if z <= 0 or s + z <= 0:
        return 0.0
    c = clamp01(cats_fraction(obs, params))
    return clamp01(c * z / (s + z))


def rule_work_raw(obs: EconObservation, params: RulePolicyParams) -> float:
    base = max(obs.savings, params.epsilon_savings) * (1.0 + obs.interest_rate)
    return (obs.expected_income / base) ** params.gamma


def rule_work_propensity(obs: EconObservation, params: RulePolicyParams) -> float:
    return clamp01(rule_work_raw(obs, params))


def resolve_labor(p_w: float, rng: np.random.Generator) -> bool:
    return bool(rng.random() < p_w)


def composite_assign(n_agents: int, rng: np.random.Generator, weights: Sequence[float] = (0.5, 0.5)) -> list[str]:
    """Assign each agent the LEN or CATS consumption rule for the whole run."""
    p_len = weights[0] / (weights[0] + weights[1])
    draws = rng.random(n_agents)
    return ["LEN" if u < p_len else "CATS" for u in draws]


# ---------------------------------------------------------------------------
# Policy objects
# ---------------------------------------------------------------------------


class Policy:
    """Base class. ``decide`` is called once per month with agents in id order."""

    name = "base"
    fallback_count = 0

    def decide(self, agents: list[AgentState], observations: list[EconObservation]) -> list[PolicyDecision]:
        raise NotImplementedError

    def end_of_month(self, month_index: int, agents: list[AgentState]) -> None:
        """Hook run after the month's markets clear."""


class RulePolicy(Policy):
    def __init__(self, consumption_rule: str = "LEN", params: RulePolicyParams | None = None):
        self.params = params or RulePolicyParams()
        self.name = consumption_rule
        self._consume = {"LEN": len_consumption, "CATS": cats_consumption}[consumption_rule]

    def decide(self, agents, observations):
        return [
            PolicyDecision(rule_work_propensity(o, self.params), self._consume(o, self.params))
            for o in observations
        ]


class CompositePolicy(Policy):
    name = "Composite"

    def __init__(self, assignment: list[str], params: RulePolicyParams | None = None):
        self.params = params or RulePolicyParams()
        self.assignment = list(assignment)

    def decide(self, agents, observations):
        out = []
        for a, o in zip(agents, observations):
            rule = len_consumption if self.assignment[a.id] == "LEN" else cats_consumption
            out.append(PolicyDecision(rule_work_propensity(o, self.params), rule(o, self.params)))
        return out


def econ_rational_rule(obs: EconObservation) -> PolicyDecision:
    """Scripted household that reacts to the labor market like a cautious person.

    Labor supply follows the wage: a rising wage draws the household into
    work, a falling one pushes it out. Losing the job last month raises the
    will to work, and a large savings cushion (relative to the wage) lowers it.
    Economy-wide unemployment over the trailing year cuts the share of wealth
    spent.
    """
    growth = obs.expected_income / obs.prev_expected_income - 1.0 if obs.prev_expected_income else 0.0
    cushion = obs.savings / max(obs.expected_income, 1e-9)
    work = 0.92 + 5.0 * growth - 0.02 * min(cushion, 6.0)
    if obs.employed_last_month is False:
        work += 0.1
    consumption = 0.3 - 1.0 * obs.trailing_unemployment
    return PolicyDecision(work, max(consumption, 0.02))


class ScriptedPolicy(Policy):
    """Wraps a plain ``EconObservation -> PolicyDecision`` callable."""

    name = "Scripted"

    def __init__(self, rule: Callable[[EconObservation], PolicyDecision] = econ_rational_rule):
        self.rule = rule

    def decide(self, agents, observations):
        return [self.rule(o) for o in observations]


def constant_rule(work: float, consumption: float) -> Callable[[EconObservation], PolicyDecision]:
    decision = PolicyDecision(work, consumption)
    return lambda obs: decision
