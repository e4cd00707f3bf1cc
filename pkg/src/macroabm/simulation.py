"""Monthly simulation driver, output files and run manifest.

Within a month the steps run in this fixed order (``STEP_ORDER``): annual
interest and Taylor update in the first month of years >= 2, job offers for
last month's unemployed, policy decisions, labor draws, production, taxes and
redistribution, demand and imbalance at the current price, consumption
matching, wage/price adjustment for next month, bookkeeping, and quarter-end
reflection for LLM agents.
"""

from __future__ import annotations

import copy
import datetime as _dt
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from macroabm import __version__
from macroabm.core import (
    AgentState,
    HOURS_PER_MONTH,
    ConfigError,
    EconomyState,
    RngStreams,
    SimConfig,
    init_population,
    load_job_titles,
    wage_deciles,
)
from macroabm.finance import accrue_interest, annual_stats, taylor_rate
from macroabm.fiscal import apply_fiscal, update_savings
from macroabm.markets import adjust_price, adjust_wages, aggregate_demand, imbalance, match_consumption, produce
from macroabm.metrics import (
    REGRESSORS,
    RegressionResult,
    YearRecord,
    okun_points,
    phillips_points,
    run_regressions,
    significance_table,
    year_records,
)
from macroabm.policies import (
    CompositePolicy,
    EconObservation,
    Policy,
    RulePolicy,
    RulePolicyParams,
    ScriptedPolicy,
    composite_assign,
    constant_rule,
    econ_rational_rule,
    resolve_labor,
)
from macroabm.records import AgentSnapshot, MonthRecord, write_months_csv, write_rows

logger = logging.getLogger(__name__)

STEP_ORDER = (
    "interest_and_taylor",
    "job_offers",
    "decide",
    "resolve_labor",
    "produce",
    "fiscal",
    "demand",
    "match_consumption",
    "adjust_wages_and_price",
    "record",
    "reflect",
)


class SimulationAbort(RuntimeError):
    """A month failed; ``checkpoint`` holds the world as it was before that month."""

    def __init__(self, month_index: int, checkpoint, cause: Exception):
        super().__init__(f"month {month_index} aborted: {cause!r}")
        self.month_index = month_index
        self.checkpoint = checkpoint
        self.__cause__ = cause


def job_offer_update(
    agent: AgentState, rng: np.random.Generator, titles_by_decile: list[list[str]], decile: int
) -> AgentState:
    """Unemployed agents get a new job offer from the titles of their wage decile."""
    if agent.worked:
        return agent
    options = titles_by_decile[decile]
    agent.job_title = options[int(rng.integers(len(options)))]
    return agent


def build_policy(config: SimConfig, n_agents: int, streams: RngStreams, client=None) -> Policy:
    pc = config.policy
    params = RulePolicyParams(beta=pc.beta, gamma=pc.gamma, h=pc.h, epsilon_savings=pc.epsilon_savings)
    if pc.name in ("LEN", "CATS"):
        return RulePolicy(pc.name, params)
    if pc.name == "Composite":
        return CompositePolicy(composite_assign(n_agents, streams.profile_init, pc.mix_weights), params)
    if pc.name == "Scripted":
        if pc.scripted.kind == "constant":
            return ScriptedPolicy(constant_rule(pc.scripted.work, pc.scripted.consumption))
        return ScriptedPolicy(econ_rational_rule)
    from macroabm.llm.agent import LLMPolicy, make_client

    return LLMPolicy(client if client is not None else make_client(pc.llm), pc.llm)


@dataclass
class Simulation:
    """Mutable state of one run. Use :meth:`run_month` to advance one month."""

    config: SimConfig
    agents: list[AgentState]
    world: EconomyState
    streams: RngStreams
    policy: Policy
    titles: list[list[str]]
    records: list[MonthRecord] = field(default_factory=list)
    prev_expected_income: dict[int, float] = field(default_factory=dict)
    prev_price: float | None = None
    prev_year_mean_price: float | None = None

    @classmethod
    def create(cls, config: SimConfig, policy: Policy | None = None, client=None) -> "Simulation":
        config.validate()
        streams = RngStreams(config.seed)
        agents, world = init_population(config, streams)
        if policy is None:
            policy = build_policy(config, len(agents), streams, client)
        return cls(config, agents, world, streams, policy, load_job_titles(config.data_files.jobs))

    # -- helpers -----------------------------------------------------------

    def _active_interventions(self) -> tuple[str, ...]:
        date = self.world.calendar_date
        return tuple(iv.sentence for iv in self.config.interventions if tuple(iv.date) <= date)

    def _unemployment(self, months: int) -> float:
        hist = self.world.employment_history[-months:]
        if not hist:
            return 0.0
        n = len(self.agents)
        return sum(n - e for e in hist) / (n * len(hist))

    def observe(self, agent: AgentState) -> EconObservation:
        w = self.world
        return EconObservation(
            expected_income=agent.monthly_wage,
            savings=agent.savings,
            prev_consumption=agent.realized_consumption,
            prev_tax=agent.tax_paid,
            prev_redistribution=agent.redistribution_received,
            price=w.price,
            interest_rate=w.interest_rate,
            month_index=w.month_index,
            date=w.calendar_date,
            employed_last_month=agent.worked,
            tax_schedule=self.config.tax_schedule,
            interventions=self._active_interventions(),
            prev_expected_income=self.prev_expected_income.get(agent.id),
            prev_price=self.prev_price,
            shortage_last_month=agent.realized_demand < agent.intended_demand,
            unemployment_last_month=self._unemployment(1),
            trailing_unemployment=self._unemployment(12),
        )

    # -- the month -----------------------------------------------------------

    def run_month(self) -> MonthRecord:
        state = (self.agents, self.world, self.prev_expected_income, self.prev_price, self.prev_year_mean_price)
        checkpoint = copy.deepcopy(state)
        try:
            return self._step()
        except Exception as exc:
            restored = copy.deepcopy(checkpoint)
            self.agents, self.world, self.prev_expected_income, self.prev_price, self.prev_year_mean_price = restored
            raise SimulationAbort(self.world.month_index, checkpoint, exc) from exc

    def _step(self) -> MonthRecord:
        cfg, w, agents, streams = self.config, self.world, self.agents, self.streams
        n = len(agents)
        m = w.month_index

        interest = [0.0] * n
        if m >= 12 and m % 12 == 0:
            before = [a.savings for a in agents]
            accrue_interest(agents, w.interest_rate)
            interest = [a.savings - b for a, b in zip(agents, before)]
            prev_mean = self.prev_year_mean_price if self.prev_year_mean_price is not None else w.initial_price
            stats = annual_stats(w.price_history[-12:], w.employment_history[-12:], prev_mean, n, year_index=m // 12)
            self.prev_year_mean_price = stats.mean_price
            w.interest_rate = taylor_rate(stats, cfg.taylor)

        if m > 0:
            deciles = wage_deciles([a.hourly_wage for a in agents])
            for a in agents:
                if not a.worked:
                    job_offer_update(a, streams.job_offers, self.titles, int(deciles[a.id]))

        observations = [self.observe(a) for a in agents]
        fallbacks_before = self.policy.fallback_count
        decisions = self.policy.decide(agents, observations)

        savings_start = [a.savings for a in agents]
        wages = [a.hourly_wage for a in agents]
        price = w.price
        for a, d in zip(agents, decisions):
            a.work_propensity = d.work_propensity
            a.consumption_propensity = d.consumption_propensity
            a.worked = resolve_labor(d.work_propensity, streams.work_sampling)
            a.income = a.monthly_wage if a.worked else 0.0

        production = produce(agents, cfg.market)
        w.production_this_month = production
        w.inventory += production

        fiscal = apply_fiscal([a.income for a in agents], cfg.tax_schedule)
        for a, post, tax in zip(agents, fiscal.post_tax_incomes, fiscal.taxes):
            update_savings(a, post, tax, fiscal.redistribution)

        demand, _ = aggregate_demand(agents, price)
        phi = imbalance(demand, w.inventory)
        if cfg.price_adjust_timing == "before_matching":
            price = adjust_price(price, phi, cfg.market, streams.price_adjust)
            aggregate_demand(agents, price)
        outcome = match_consumption(agents, w.inventory, price, streams.consumption_order)
        w.inventory = outcome.inventory

        adjust_wages(agents, phi, cfg.market, streams.wage_adjust)
        next_price = price
        if cfg.price_adjust_timing == "end_of_month":
            next_price = adjust_price(price, phi, cfg.market, streams.price_adjust)

        employed = sum(1 for a in agents if a.worked)
        mean_wage = sum(wages) / n
        w.price_history.append(price)
        w.mean_wage_history.append(mean_wage)
        w.employment_history.append(employed)

        record = MonthRecord(
            month_index=m,
            date=w.calendar_date,
            price=price,
            interest_rate=w.interest_rate,
            production=production,
            total_demand=demand,
            imbalance=phi,
            employed_count=employed,
            inventory=w.inventory,
            next_price=next_price,
            mean_wage=mean_wage,
            fallback_count=self.policy.fallback_count - fallbacks_before,
            agents=[
                AgentSnapshot(
                    agent_id=a.id,
                    work_propensity=a.work_propensity,
                    consumption_propensity=a.consumption_propensity,
                    worked=a.worked,
                    income=a.income,
                    tax=a.tax_paid,
                    redistribution=a.redistribution_received,
                    consumption=a.realized_consumption,
                    demand=a.realized_demand,
                    savings=a.savings,
                    savings_start=savings_start[i],
                    hourly_wage=wages[i],
                    interest=interest[i],
                )
                for i, a in enumerate(agents)
            ],
        )
        self.policy.end_of_month(m, agents)

        self.prev_expected_income = {a.id: HOURS_PER_MONTH * wages[a.id] for a in agents}
        self.prev_price = price
        w.price = next_price
        w.month_index += 1
        self.records.append(record)
        return record


@dataclass
class RunResult:
    months: list[MonthRecord]
    years: list[YearRecord]
    manifest: dict
    regressions: list[RegressionResult]
    simulation: Simulation


def analyze(months: list[MonthRecord], n_agents: int, initial_price: float, initial_mean_wage: float) -> dict:
    """Indicators, regularities and regressions derived from month records."""
    years = year_records(months, n_agents, initial_price, initial_mean_wage)
    out: dict = {"years": years, "phillips": [], "okun": [], "okun_skipped": 0}
    if len(years) >= 2:
        out["phillips"] = phillips_points(years)
        out["okun"], out["okun_skipped"] = okun_points(years)
    out["regressions"], out["regression_failures"] = run_regressions(months) if len(months) > 8 else ([], [])
    out["significance"] = significance_table(out["regressions"])
    return out


def write_analysis(out_dir: Path, analysis: dict) -> list[str]:
    years = analysis["years"]
    write_rows(
        out_dir / "years.csv",
        [
            "year_index",
            "nominal_gdp",
            "real_gdp",
            "price_inflation",
            "wage_inflation",
            "unemployment",
            "unemployment_growth",
            "real_gdp_growth",
            "mean_price",
            "mean_wage",
            "interest_rate",
        ],
        [
            (
                y.year_index,
                y.nominal_gdp,
                y.real_gdp,
                y.price_inflation,
                y.wage_inflation,
                y.unemployment,
                y.unemployment_growth,
                y.real_gdp_growth,
                y.mean_price,
                y.mean_wage,
                y.interest_rate,
            )
            for y in years
        ],
    )
    write_rows(
        out_dir / "phillips.csv",
        ["year_index", "unemployment", "wage_inflation"],
        [(i + 2, u, wi) for i, (u, wi) in enumerate(analysis["phillips"])],
    )
    write_rows(out_dir / "okun.csv", ["unemployment_growth", "real_gdp_growth"], analysis["okun"])
    rows = []
    for res in analysis["regressions"]:
        for term in ["intercept", *REGRESSORS]:
            rows.append(
                (
                    res.agent_id,
                    res.target,
                    term,
                    res.coefficients[term],
                    res.std_errors[term],
                    res.p_values[term],
                    res.n_obs,
                    1 if term in res.dropped else 0,
                    res.skipped or "",
                )
            )
    write_rows(
        out_dir / "regressions.csv",
        ["agent_id", "target", "term", "coefficient", "std_error", "p_value", "n_obs", "dropped", "skipped"],
        rows,
    )
    table = analysis["significance"]
    write_rows(out_dir / "significance.csv", ["target", *REGRESSORS], [(t, *table[t].values()) for t in table])
    return ["years.csv", "phillips.csv", "okun.csv", "regressions.csv", "significance.csv"]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_simulation(
    config: SimConfig, policy: Policy | None = None, client=None, output_dir: str | Path | None = None
) -> RunResult:
    """Run ``config.num_months`` months and, if an output directory is set, write all files."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    sim = Simulation.create(config, policy=policy, client=client)
    out_dir = Path(output_dir or config.output_dir) if (output_dir or config.output_dir) else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    manifest = {
        "status": "running",
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "software_version": __version__,
        "started": started,
        "num_agents": config.num_agents,
        "initial_price": sim.world.initial_price,
        "initial_mean_wage": sim.world.initial_mean_wage,
        "step_order": list(STEP_ORDER),
        "parameters": config.to_dict(),
    }
    error = None
    try:
        for _ in range(config.num_months):
            sim.run_month()
    except SimulationAbort as exc:
        error = exc
        manifest["status"] = "failed"
        manifest["error"] = str(exc)
        manifest["failed_month"] = exc.month_index

    months = sim.records
    analysis = analyze(months, config.num_agents, sim.world.initial_price, sim.world.initial_mean_wage)
    if error is None:
        manifest["status"] = "completed"
    manifest["months_completed"] = len(months)
    manifest["fallback_count"] = sim.policy.fallback_count
    if hasattr(sim.policy, "chat_counts"):
        manifest["chat_counts"] = dict(sim.policy.chat_counts)
        manifest["max_memory_size"] = sim.policy.max_memory_size
    manifest["regression_failures"] = [list(f) for f in analysis["regression_failures"]]
    manifest["okun_skipped"] = analysis["okun_skipped"]

    if out_dir is not None:
        files = ["months.csv"]
        write_months_csv(months, out_dir / "months.csv")
        files += write_analysis(out_dir, analysis)
        if hasattr(sim.policy, "dialogue_log"):
            with open(out_dir / "dialogues.jsonl", "w", encoding="utf-8") as fh:
                for rec in sim.policy.dialogue_log:
                    fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            files.append("dialogues.jsonl")
        manifest["finished"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        manifest["checksums"] = {f: _sha256(out_dir / f) for f in files}
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
    else:
        manifest["finished"] = _dt.datetime.now(_dt.timezone.utc).isoformat()

    if error is not None:
        raise error
    return RunResult(months, analysis["years"], manifest, analysis["regressions"], sim)


__all__ = [
    "ConfigError",
    "RunResult",
    "STEP_ORDER",
    "Simulation",
    "SimulationAbort",
    "analyze",
    "build_policy",
    "job_offer_update",
    "run_simulation",
]
