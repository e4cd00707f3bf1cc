"""Progressive income tax, per-capita redistribution and the savings update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from macroabm.core import AgentState, TaxSchedule


@dataclass(frozen=True)
class FiscalOutcome:
    taxes: list[float]
    redistribution: float
    post_tax_incomes: list[float]


def compute_tax(income: float, schedule: TaxSchedule) -> float:
    """Tax owed on a monthly income under a marginal-rate schedule.

    Each bracket taxes only the slice of income that falls inside it; the
    last bracket is open above.
    """
    if income < 0:
        raise ValueError(f"income must be non-negative, got {income}")
    brackets, rates = schedule.brackets, schedule.rates
    tax = 0.0
    for k, rate in enumerate(rates):
        lo = brackets[k]
        if income <= lo:
            break
        hi = brackets[k + 1] if k + 1 < len(brackets) else income
        tax += rate * (min(income, hi) - lo)
    return tax


def compute_taxes(incomes, schedule: TaxSchedule) -> np.ndarray:
    """Vectorized :func:`compute_tax`; sums brackets in the same order, so results match bit for bit."""
    z = np.asarray(incomes, dtype=float)
    if np.any(z < 0) or np.any(np.isnan(z)):
        raise ValueError("incomes must be non-negative")
    brackets, rates = schedule.brackets, schedule.rates
    tax = np.zeros_like(z)
    for k, rate in enumerate(rates):
        lo = brackets[k]
        width = brackets[k + 1] - lo if k + 1 < len(brackets) else np.inf
        tax += rate * np.clip(z - lo, 0.0, width)
    return tax


def apply_fiscal(incomes: list[float], schedule: TaxSchedule) -> FiscalOutcome:
    if len(incomes) == 0:
        raise ValueError("apply_fiscal needs at least one income")
    taxes = compute_taxes(incomes, schedule).tolist()
    total = 0.0
    for t in taxes:
        total += t
    redistribution = total / len(incomes)
    post = [z - t + redistribution for z, t in zip(incomes, taxes)]
    return FiscalOutcome(taxes=taxes, redistribution=redistribution, post_tax_incomes=post)


def update_savings(agent: AgentState, post_tax_income: float, tax: float = 0.0, redistribution: float = 0.0) -> AgentState:
    agent.savings += post_tax_income
    agent.tax_paid = tax
    agent.redistribution_received = redistribution
    return agent
