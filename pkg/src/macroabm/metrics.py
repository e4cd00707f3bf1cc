"""Annual indicators, Phillips/Okun regularities and per-agent decision regressions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import betainc, stdtr

from macroabm.core import HOURS_PER_MONTH
from macroabm.records import MonthRecord

REGRESSORS = ("v", "c_hat", "tax", "z_r", "P", "s", "r")
TARGETS = ("work", "consumption")


@dataclass(frozen=True)
class YearRecord:
    year_index: int
    nominal_gdp: float
    real_gdp: float
    price_inflation: float
    wage_inflation: float
    unemployment: float
    unemployment_growth: float
    real_gdp_growth: float
    mean_price: float
    mean_wage: float
    interest_rate: float


@dataclass
class RegressionResult:
    agent_id: int
    target: str
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    p_values: dict[str, float]
    n_obs: int
    dropped: list[str] = field(default_factory=list)
    skipped: str | None = None


class SingularDesignError(ValueError):
    def __init__(self, columns: list[str]):
        super().__init__(f"collinear regressors: {', '.join(columns)}")
        self.columns = columns


# ---------------------------------------------------------------------------
# Indicators
# ---------------------------------------------------------------------------


def _check_year(months: Sequence[MonthRecord]) -> None:
    if len(months) != 12:
        raise ValueError(f"a year has 12 months, got {len(months)}")


def nominal_gdp(months: Sequence[MonthRecord]) -> float:
    _check_year(months)
    return sum(m.production * m.price for m in months)


def real_gdp(months: Sequence[MonthRecord], reference_price: float) -> float:
    _check_year(months)
    if reference_price <= 0:
        raise ValueError("reference price must be positive")
    return sum(m.production * reference_price for m in months)


def wage_inflation(year_mean_wage: float, prev_year_mean_wage: float) -> float:
    if prev_year_mean_wage <= 0:
        raise ValueError("previous mean wage must be positive")
    return (year_mean_wage - prev_year_mean_wage) / prev_year_mean_wage


def _growth(cur: float, prev: float) -> float:
    return (cur - prev) / prev if prev > 0 else math.nan


def year_records(
    months: Sequence[MonthRecord], n_agents: int, initial_price: float, initial_mean_wage: float
) -> list[YearRecord]:
    """One record per completed simulated year.

    Year 1 inflations compare against the initial price and wage; its growth
    rates are NaN because there is no previous year.
    """
    out: list[YearRecord] = []
    reference = None
    prev_price, prev_wage = initial_price, initial_mean_wage
    for y in range(len(months) // 12):
        block = months[12 * y : 12 * y + 12]
        mean_price = sum(m.price for m in block) / 12
        mean_wage = sum(m.mean_wage for m in block) / 12
        if reference is None:
            reference = mean_price
        unemployment = sum(n_agents - m.employed_count for m in block) / (12 * n_agents)
        real = real_gdp(block, reference)
        prev = out[-1] if out else None
        out.append(
            YearRecord(
                year_index=y + 1,
                nominal_gdp=nominal_gdp(block),
                real_gdp=real,
                price_inflation=(mean_price - prev_price) / prev_price,
                wage_inflation=wage_inflation(mean_wage, prev_wage),
                unemployment=unemployment,
                unemployment_growth=_growth(unemployment, prev.unemployment) if prev else math.nan,
                real_gdp_growth=_growth(real, prev.real_gdp) if prev else math.nan,
                mean_price=mean_price,
                mean_wage=mean_wage,
                interest_rate=block[0].interest_rate,
            )
        )
        prev_price, prev_wage = mean_price, mean_wage
    return out


# ---------------------------------------------------------------------------
# Regularities
# ---------------------------------------------------------------------------


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Sample correlation and its two-sided p-value (t with n - 2 dof)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n != len(y) or n < 3:
        raise ValueError("pearson needs two equal-length series of at least 3 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("pearson is undefined for a constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = min(1.0, max(-1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, float(2.0 * stdtr(n - 2, -abs(t)))


def phillips_points(years: Sequence[YearRecord]) -> list[tuple[float, float]]:
    if len(years) < 2:
        raise ValueError("need at least 2 years")
    return [(y.unemployment, y.wage_inflation) for y in years[1:]]


def okun_points(years: Sequence[YearRecord]) -> tuple[list[tuple[float, float]], int]:
    """(unemployment growth, real GDP growth) pairs and the count of skipped years."""
    if len(years) < 2:
        raise ValueError("need at least 2 years")
    points, skipped = [], 0
    for prev, cur in zip(years, years[1:]):
        if prev.unemployment <= 0 or prev.real_gdp <= 0:
            skipped += 1
            continue
        points.append(
            (
                (cur.unemployment - prev.unemployment) / prev.unemployment,
                (cur.real_gdp - prev.real_gdp) / prev.real_gdp,
            )
        )
    return points, skipped


# ---------------------------------------------------------------------------
# Regressions
# ---------------------------------------------------------------------------


def _collinear_columns(X: np.ndarray, names: Sequence[str]) -> list[str]:
    bad, kept = [], [np.ones(len(X))]
    for j, name in enumerate(names):
        trial = np.column_stack(kept + [X[:, j]])
        if np.linalg.matrix_rank(trial) < trial.shape[1]:
            bad.append(name)
        else:
            kept.append(X[:, j])
    return bad


def ols(X: np.ndarray, y: np.ndarray, names: Sequence[str]) -> tuple[dict, dict, dict]:
    """OLS with intercept via QR; two-sided t-test p-values with n - k - 1 dof."""
    n, k = X.shape
    design = np.column_stack([np.ones(n), X])
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * diag.max():
        raise SingularDesignError(_collinear_columns(X, names) or list(names))
    beta = solve_triangular(r, q.T @ y)
    resid = y - design @ beta
    dof = n - k - 1
    sigma2 = float(resid @ resid) / dof
    r_inv = solve_triangular(r, np.eye(k + 1))
    se = np.sqrt(sigma2 * np.sum(r_inv**2, axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta / se
    # two-sided t tail written as a regularized incomplete beta
    p = np.where(se > 0, betainc(dof / 2.0, 0.5, dof / (dof + t**2)), 0.0)
    labels = ["intercept", *names]
    return (
        dict(zip(labels, beta.tolist())),
        dict(zip(labels, se.tolist())),
        dict(zip(labels, np.clip(p, 0.0, 1.0).tolist())),
    )


def zscore(a: np.ndarray) -> np.ndarray:
    return (a - a.mean(axis=0)) / a.std(axis=0)


def regress(
    X: np.ndarray, y: np.ndarray, names: Sequence[str] = REGRESSORS, agent_id: int = -1, target: str = ""
) -> RegressionResult:
    """Z-score every column and the target, drop constant columns, then OLS."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n <= X.shape[1] + 1:
        raise ValueError(f"need more than {X.shape[1] + 1} observations, got {n}")
    if np.ptp(y) == 0:
        zeros = {name: 0.0 for name in ["intercept", *names]}
        ones = {name: 1.0 for name in ["intercept", *names]}
        return RegressionResult(agent_id, target, zeros, dict(zeros), ones, n, [], "constant target")
    keep = [j for j in range(X.shape[1]) if np.ptp(X[:, j]) > 0]
    dropped = [names[j] for j in range(X.shape[1]) if j not in keep]
    kept_names = [names[j] for j in keep]
    coef, se, p = ols(zscore(X[:, keep]), zscore(y), kept_names)
    for name in dropped:
        coef[name], se[name], p[name] = 0.0, math.nan, 1.0
    return RegressionResult(agent_id, target, coef, se, p, n, dropped)


def agent_regression(
    X: np.ndarray, work: np.ndarray, consumption: np.ndarray, agent_id: int = -1
) -> tuple[RegressionResult, RegressionResult]:
    return (
        regress(X, work, REGRESSORS, agent_id, "work"),
        regress(X, consumption, REGRESSORS, agent_id, "consumption"),
    )


def regression_data(months: Sequence[MonthRecord]) -> dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Decision-time regressors and targets per agent.

    Consumption, tax and redistribution come from the previous month (zeros
    in the first month); savings are the balance the agent saw when deciding.
    """
    per_agent: dict[int, list] = {}
    prev: dict[int, tuple[float, float, float]] = {}
    for rec in months:
        for snap in rec.agents:
            c, t, zr = prev.get(snap.agent_id, (0.0, 0.0, 0.0))
            row = (
                HOURS_PER_MONTH * snap.hourly_wage,
                c,
                t,
                zr,
                rec.price,
                snap.savings_start,
                rec.interest_rate,
                snap.work_propensity,
                snap.consumption_propensity,
            )
            per_agent.setdefault(snap.agent_id, []).append(row)
            prev[snap.agent_id] = (snap.consumption, snap.tax, snap.redistribution)
    out = {}
    for aid, rows in per_agent.items():
        arr = np.array(rows, dtype=float)
        out[aid] = (arr[:, :7], arr[:, 7], arr[:, 8])
    return out


def run_regressions(months: Sequence[MonthRecord]) -> tuple[list[RegressionResult], list[tuple[int, str, str]]]:
    """Regress every agent; agents whose design is singular are reported, not raised."""
    results, failures = [], []
    for aid, (X, pw, pc) in sorted(regression_data(months).items()):
        for target, y in (("work", pw), ("consumption", pc)):
            try:
                results.append(regress(X, y, REGRESSORS, aid, target))
            except (SingularDesignError, ValueError) as exc:
                failures.append((aid, target, str(exc)))
    return results, failures


def significance_table(results: Sequence[RegressionResult], alpha: float = 0.05) -> dict[str, dict[str, int]]:
    table = {t: {name: 0 for name in REGRESSORS} for t in TARGETS}
    for res in results:
        if res.skipped:
            continue
        for name in REGRESSORS:
            if res.p_values.get(name, 1.0) <= alpha:
                table[res.target][name] += 1
    return table
