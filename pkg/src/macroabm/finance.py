"""Annual interest on savings and the Taylor-rule interest rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from macroabm.core import AgentState, TaylorParams


@dataclass(frozen=True)
class AnnualStats:
    year_index: int
    mean_price: float
    inflation: float
    unemployment: float
    mean_wage: float


def annual_stats(
    prices: Sequence[float],
    employed: Sequence[int],
    prev_mean_price: float,
    n_agents: int,
    mean_wages: Sequence[float] | None = None,
    year_index: int = 1,
) -> AnnualStats:
    """Summarize one year from its 12 monthly prices and employed counts."""
    if len(prices) != 12 or len(employed) != 12:
        raise ValueError("annual_stats needs exactly 12 months")
    if prev_mean_price <= 0:
        raise ValueError("previous mean price must be positive")
    mean_price = sum(prices) / 12
    idle = sum(n_agents - e for e in employed)
    mean_wage = sum(mean_wages) / 12 if mean_wages is not None else float("nan")
    return AnnualStats(
        year_index=year_index,
        mean_price=mean_price,
        inflation=(mean_price - prev_mean_price) / prev_mean_price,
        unemployment=idle / (12 * n_agents),
        mean_wage=mean_wage,
    )


def taylor_rate_unclamped(inflation: float, unemployment: float, params: TaylorParams) -> float:
    return (
        params.natural_rate
        + params.target_inflation
        + params.inflation_coeff * (inflation - params.target_inflation)
        + params.unemployment_coeff * (params.natural_unemployment - unemployment)
    )


def taylor_rate(stats: AnnualStats, params: TaylorParams) -> float:
    return max(taylor_rate_unclamped(stats.inflation, stats.unemployment, params), 0.0)


def accrue_interest(agents: list[AgentState], rate: float) -> list[AgentState]:
    if rate < 0:
        raise ValueError("interest rate must be non-negative")
    for a in agents:
        a.savings *= 1.0 + rate
    return agents
