"""Goods production, demand, supply-demand imbalance, wage/price adjustment and
inventory-limited consumption matching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from macroabm.core import AgentState, MarketParams


@dataclass
class MonthMarketOutcome:
    production: float = 0.0
    total_demand: float = 0.0
    imbalance: float = 0.0
    realized_demand: list[float] = field(default_factory=list)
    realized_consumption: list[float] = field(default_factory=list)
    inventory: float = 0.0
    price: float = 0.0
    wage_multipliers: list[float] = field(default_factory=list)


def produce(agents: list[AgentState], params: MarketParams) -> float:
    workers = sum(1 for a in agents if a.worked)
    return workers * params.hours_per_month * params.productivity


def aggregate_demand(agents: list[AgentState], price: float) -> tuple[float, list[float]]:
    """Intended demand ``p^c * s / P`` per agent; also records it on the agents."""
    if price <= 0:
        raise ValueError(f"price must be positive, got {price}")
    per_agent = []
    total = 0.0
    for a in agents:
        a.intended_consumption = a.consumption_propensity * a.savings
        a.intended_demand = a.intended_consumption / price
        per_agent.append(a.intended_demand)
        total += a.intended_demand
    return total, per_agent


def imbalance(demand: float, inventory: float) -> float:
    if demand == inventory:
        return 0.0
    return (demand - inventory) / max(demand, inventory)


def _signed_draws(phi: float, max_rate: float, rng: np.random.Generator, size: int) -> np.ndarray:
    # always consume the same number of draws so stream positions do not depend on phi
    u = rng.uniform(0.0, 1.0, size=size)
    return np.sign(phi) * u * (max_rate * abs(phi))


def adjust_wages(agents: list[AgentState], phi: float, params: MarketParams, rng: np.random.Generator) -> list[float]:
    """Multiply every hourly wage by ``1 + phi_i``; returns the multipliers."""
    draws = _signed_draws(phi, params.max_wage_rate, rng, len(agents))
    multipliers = []
    for a, d in zip(agents, draws):
        m = 1.0 + float(d)
        a.hourly_wage *= m
        multipliers.append(m)
    return multipliers


def adjust_price(price: float, phi: float, params: MarketParams, rng: np.random.Generator) -> float:
    d = float(_signed_draws(phi, params.max_price_rate, rng, 1)[0])
    return price * (1.0 + d)


def match_consumption(
    agents: list[AgentState], inventory: float, price: float, rng: np.random.Generator
) -> MonthMarketOutcome:
    """Serve agents in a random order until each has bought once.

    Uses the intended demand already stored on each agent by
    :func:`aggregate_demand`. Savings are debited as goods are handed out.
    """
    n = len(agents)
    realized_d = [0.0] * n
    realized_c = [0.0] * n
    for j in rng.permutation(n):
        a = agents[j]
        if a.intended_demand <= inventory:
            d_hat = a.intended_demand
            c_hat = a.intended_consumption
        else:
            d_hat = inventory
            c_hat = min(d_hat * price, a.intended_consumption)
        inventory -= d_hat
        a.savings -= c_hat
        a.realized_demand = d_hat
        a.realized_consumption = c_hat
        realized_d[j] = d_hat
        realized_c[j] = c_hat
    return MonthMarketOutcome(
        realized_demand=realized_d,
        realized_consumption=realized_c,
        inventory=max(inventory, 0.0),
        price=price,
    )
