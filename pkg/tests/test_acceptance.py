"""Acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (shown even when
pytest captures output) and then asserts on the same outcome. Run only this
suite with ``pytest tests/test_acceptance.py -v``, or run it as a script with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from macroabm import SimConfig, run_simulation
from macroabm.core import COVID_SENTENCE, AgentState, PolicyConfig, TaxSchedule, TaylorParams
from macroabm.finance import AnnualStats, taylor_rate
from macroabm.fiscal import apply_fiscal, compute_tax
from macroabm.llm import build_decision_prompt
from macroabm.metrics import REGRESSORS, agent_regression, okun_points, pearson, phillips_points, zscore
from macroabm.policies import EconObservation
from macroabm.records import write_months_csv

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"
CONFIGS = ROOT / "configs"
SCHEDULE = TaxSchedule()


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def tax_oracle(z: float) -> float:
    total, edges = 0.0, list(SCHEDULE.brackets) + [math.inf]
    for lo, hi, rate in zip(edges, edges[1:], SCHEDULE.rates):
        total += rate * max(0.0, min(z, hi) - lo)
    return total


def ols_oracle(X: np.ndarray, y: np.ndarray):
    """Normal equations on z-scored data, p-values from scipy's t distribution."""
    Xz, yz = zscore(X), zscore(y)
    n, k = Xz.shape
    A = np.column_stack([np.ones(n), Xz])
    inv = np.linalg.inv(A.T @ A)
    beta = inv @ A.T @ yz
    resid = yz - A @ beta
    se = np.sqrt(resid @ resid / (n - k - 1) * np.diag(inv))
    return beta, 2 * stats.t.sf(np.abs(beta / se), n - k - 1)


def pearson_oracle(x, y) -> float:
    mx, my = math.fsum(x) / len(x), math.fsum(y) / len(y)
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def csv_bytes(months) -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "months.csv"
        write_months_csv(months, path)
        return path.read_bytes()


def fixture_state():
    raw = json.loads((DATA / "reference_prompt_fixture.json").read_text())
    obs = dict(raw["observation"], date=tuple(raw["observation"]["date"]), interventions=())
    return AgentState(**raw["agent"]), obs


# ---------------------------------------------------------------------------
# Criteria: each returns (passed, detail)
# ---------------------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(2024)
    worst = max(
        abs(compute_tax(z, SCHEDULE) - tax_oracle(z)) / max(tax_oracle(z), 1e-300) for z in rng.uniform(0, 1e6, 1000)
    )
    anchor = compute_tax(84144.58, SCHEDULE)
    anchor_rel = abs(anchor - 28216.98) / 28216.98
    ok = worst <= 1e-9 and anchor_rel <= 1e-3
    return ok, f"max rel err {worst:.1e}; tax(84144.58)={anchor:.2f} vs 28216.98 (rel {anchor_rel:.1e})"


def criterion_2():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(10_000):
        z = rng.uniform(0, 1e6, rng.integers(1, 501)).tolist()
        post = apply_fiscal(z, SCHEDULE).post_tax_incomes
        total = math.fsum(z)
        worst = max(worst, abs(math.fsum(post) - total) / max(total, 1e-300))
    return worst <= 1e-9, f"10000 populations, max rel gap {worst:.1e}"


def criterion_3():
    params = TaylorParams()
    r = taylor_rate(AnnualStats(2, 1.0, 0.02, 0.04, 1.0), params)
    rng = np.random.default_rng(3)
    draws = zip(rng.uniform(-1, 1, 10_000), rng.uniform(0, 1, 10_000))
    floor_ok = all(taylor_rate(AnnualStats(2, 1.0, pi, u, 1.0), params) >= 0.0 for pi, u in draws)
    return r == 0.03 and floor_ok, f"r(0.02, 0.04)={r!r}; floor holds on 10000 draws: {floor_ok}"


def criterion_4():
    cfg = SimConfig(num_agents=100, num_months=240, seed=7, policy=PolicyConfig(name="LEN", beta=0.1, gamma=0.1, h=1.0))
    result = run_simulation(cfg)
    a_p, a_w, eps = cfg.market.max_price_rate, cfg.market.max_wage_rate, 1e-12
    problems = []
    months = result.months
    for rec in months:
        if rec.inventory < 0:
            problems.append(f"inventory<0 at {rec.month_index}")
        if abs(rec.next_price - rec.price) / rec.price > a_p * abs(rec.imbalance) + eps:
            problems.append(f"price step at {rec.month_index}")
    for rec, nxt in zip(months, months[1:]):
        for a, b in zip(rec.agents, nxt.agents):
            if abs(b.hourly_wage - a.hourly_wage) / a.hourly_wage > a_w * abs(rec.imbalance) + eps:
                problems.append(f"wage step agent {a.agent_id} month {rec.month_index}")
                break
    prev = None
    for y in result.years:
        if not 0.0 <= y.unemployment <= 1.0:
            problems.append(f"unemployment year {y.year_index}")
        values = [y.nominal_gdp, y.real_gdp, y.price_inflation, y.wage_inflation, y.unemployment]
        if prev is not None:
            values.append(y.real_gdp_growth)
            if prev.unemployment > 0:  # growth of a zero rate is undefined and skipped downstream
                values.append(y.unemployment_growth)
        if not all(math.isfinite(v) for v in values):
            problems.append(f"non-finite indicator year {y.year_index}")
        prev = y
    return not problems, f"240 months, {len(problems)} violations" + (f" ({problems[:3]})" if problems else "")


def criterion_5():
    names = ("LEN", "CATS", "Composite", "LLM")
    same = {}
    for name in names:
        cfg = SimConfig(num_agents=100, num_months=240, seed=11, policy=PolicyConfig(name=name))
        same[name] = csv_bytes(run_simulation(cfg).months) == csv_bytes(run_simulation(cfg).months)
    return all(same.values()), "byte-identical months.csv: " + ", ".join(f"{k}={v}" for k, v in same.items())


def criterion_6():
    rng = np.random.default_rng(6)
    worst_coef = worst_p = 0.0
    for _ in range(100):
        X = rng.normal(size=(240, 7)) @ (np.eye(7) + 0.2 * rng.normal(size=(7, 7)))
        work = X @ rng.normal(size=7) + rng.normal(size=240)
        cons = X @ rng.normal(size=7) + rng.normal(size=240)
        for res, y in zip(agent_regression(X, work, cons), (work, cons)):
            beta, p = ols_oracle(X, y)
            labels = ["intercept", *REGRESSORS]
            coef = np.array([res.coefficients[k] for k in labels])
            pv = np.array([res.p_values[k] for k in labels])
            worst_coef = max(worst_coef, float(np.max(np.abs(coef - beta))))
            worst_p = max(worst_p, float(np.max(np.abs(pv - p))))
    X = rng.normal(size=(240, 7))
    single = agent_regression(X, 2.0 * X[:, 0] + 0.1 * rng.normal(size=240), rng.normal(size=240))[0]
    ok = worst_coef <= 1e-8 and worst_p <= 1e-8 and single.p_values["v"] < 1e-10
    return ok, f"max |coef diff| {worst_coef:.1e}, max |p diff| {worst_p:.1e}, single-driver p {single.p_values['v']:.1e}"


def criterion_7():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(3, 60))
        x = rng.normal(size=n)
        y = 0.5 * x + rng.normal(size=n)
        worst = max(worst, abs(pearson(x, y)[0] - pearson_oracle(x.tolist(), y.tolist())))
    x = np.linspace(-3, 7, 25)
    up, down = pearson(x, 3 * x + 2)[0], pearson(x, -0.5 * x + 1)[0]
    ok = worst <= 1e-12 and abs(up - 1) <= 1e-12 and abs(down + 1) <= 1e-12
    return ok, f"max |r diff| {worst:.1e}; linear r={up!r}, {down!r}"


def criterion_8():
    agent, obs = fixture_state()
    golden = (DATA / "reference_prompt.txt").read_text(encoding="utf-8").rstrip("\n")
    same = build_decision_prompt(agent, EconObservation(**obs)) == golden
    jobless = build_decision_prompt(agent, EconObservation(**dict(obs, employed_last_month=False)))
    clause = "you became unemployed and had no income" in jobless
    covid = build_decision_prompt(agent, EconObservation(**dict(obs, date=(2020, 3), interventions=(COVID_SENTENCE,))))
    sentence = "the federal government has declared a national emergency since March 2020" in covid
    return same and clause and sentence, f"byte-identical={same}, unemployment clause={clause}, COVID sentence={sentence}"


def criterion_9():
    cfg = SimConfig.from_json(CONFIGS / "econ_rational.json")
    years = run_simulation(cfg).years
    r_ph, p_ph = pearson(*zip(*phillips_points(years)))
    okun, skipped = okun_points(years)
    r_ok, p_ok = pearson(*zip(*okun))
    ok = r_ph < 0 and p_ph < 0.05 and r_ok < 0 and p_ok < 0.05
    return ok, f"Phillips r={r_ph:.3f} p={p_ph:.2g}; Okun r={r_ok:.3f} p={p_ok:.2g} ({skipped} skipped)"


def criterion_10():
    cfg = SimConfig.from_json(CONFIGS / "covid.json")
    with_iv = run_simulation(cfg)
    without = run_simulation(cfg.replace(interventions=()))

    def u2020(result):
        years = {cfg.start_date[0] + y.year_index - 1: y for y in result.years}
        return years[2020].unemployment

    a, b = u2020(with_iv), u2020(without)
    return a > b, f"2020 unemployment {a:.4f} with intervention vs {b:.4f} without"


def criterion_11():
    cfg = SimConfig(num_agents=10, num_months=24, seed=1, policy=PolicyConfig(name="LLM"))
    result = run_simulation(cfg)
    m = result.manifest
    capacity = 2 * cfg.policy.llm.memory_months + 1
    ok = (
        m["chat_counts"] == {"decision": 240, "reflection": 80}
        and m["max_memory_size"] <= capacity
        and m["fallback_count"] == 0
    )
    return ok, f"chats {m['chat_counts']}, max memory {m['max_memory_size']}/{capacity}, fallbacks {m['fallback_count']}"


BUDGETS = {1: 1, 2: 5, 3: 1, 4: 60, 5: 180, 6: 10, 7: 1, 8: 1, 9: 120, 10: 120, 11: 30}
CHECKS = {n: globals()[f"criterion_{n}"] for n in BUDGETS}


def evaluate(number: int) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = CHECKS[number]()
    elapsed = time.perf_counter() - start
    within = elapsed <= BUDGETS[number]
    line = f"ACCEPTANCE {number:2d} {'PASS' if ok and within else 'FAIL'}: {detail} [{elapsed:.2f}s / {BUDGETS[number]}s]"
    return ok and within, line


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_acceptance(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CHECKS)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
