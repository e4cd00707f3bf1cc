import csv
import json
from importlib import resources

import numpy as np
import pytest
from scipy import stats

from macroabm.core import (
    HOURS_PER_MONTH,
    AgentState,
    ConfigError,
    ParetoParams,
    RngStreams,
    SimConfig,
    TaxSchedule,
    calendar_date,
    derive_stream,
    init_population,
    load_job_titles,
    wage_deciles,
)


def test_derive_stream_is_reproducible():
    a = derive_stream(42, "price_adjust").random(100)
    b = derive_stream(42, "price_adjust").random(100)
    assert np.array_equal(a, b)


def test_derive_stream_names_and_seeds_differ():
    base = derive_stream(42, "price_adjust").random(100)
    assert not np.array_equal(base, derive_stream(42, "wage_adjust").random(100))
    assert not np.array_equal(base, derive_stream(43, "price_adjust").random(100))
    # pinned first draws
    assert base[0] == pytest.approx(0.6404237575500984, abs=0)
    assert derive_stream(42, "wage_adjust").random() == pytest.approx(0.24479957924302564, abs=0)
    assert derive_stream(43, "price_adjust").random() == pytest.approx(0.5892821098083185, abs=0)


def test_streams_do_not_interfere():
    s1, s2 = RngStreams(5), RngStreams(5)
    s1.work_sampling.random(1000)  # exhaust one stream
    assert s1.price_adjust.random() == s2.price_adjust.random()


def test_init_population_single_agent(monkeypatch):
    cfg = SimConfig(num_agents=1)
    monkeypatch.setattr("macroabm.core.sample_hourly_wages", lambda p, n, rng: np.array([10.0]))
    agents, world = init_population(cfg, RngStreams(1))
    assert agents[0].monthly_wage == 1680.0
    assert world.price == 10.0


def test_init_population_price_is_mean_wage(monkeypatch):
    cfg = SimConfig(num_agents=3)
    monkeypatch.setattr("macroabm.core.sample_hourly_wages", lambda p, n, rng: np.array([10.0, 20.0, 30.0]))
    agents, world = init_population(cfg, RngStreams(1))
    assert world.price == 20.0
    assert world.inventory == 0.0
    assert world.interest_rate == cfg.taylor.natural_rate
    assert all(a.savings == 0.0 for a in agents)


def test_init_population_pareto_ks():
    cfg = SimConfig(num_agents=100, seed=42)
    agents, _ = init_population(cfg, RngStreams(42))
    wages = [a.hourly_wage for a in agents]
    p = cfg.wage_pareto
    ks = stats.kstest(wages, stats.pareto(b=p.shape, scale=p.scale).cdf)
    critical = 1.358 / np.sqrt(len(wages))  # asymptotic 5% two-sided
    assert ks.statistic < critical


def test_init_population_is_replayable():
    cfg = SimConfig(num_agents=50, seed=9)
    a1, w1 = init_population(cfg, RngStreams(9))
    a2, w2 = init_population(cfg, RngStreams(9))
    assert a1 == a2
    assert w1.price == w2.price


def test_init_population_profiles():
    cfg = SimConfig(num_agents=200, seed=3)
    agents, world = init_population(cfg, RngStreams(3))
    titles = load_job_titles()
    deciles = wage_deciles([a.hourly_wage for a in agents])
    for a in agents:
        assert 18 <= a.age <= 60
        assert a.job_title in titles[deciles[a.id]]
        assert a.monthly_wage == HOURS_PER_MONTH * a.hourly_wage
    assert len({a.name for a in agents}) == 200  # names are made unique past the list length
    assert world.price == pytest.approx(np.mean([a.hourly_wage for a in agents]), rel=1e-15)


def test_bad_pareto_shape():
    with pytest.raises(ConfigError, match="wage_pareto.shape"):
        SimConfig(wage_pareto=ParetoParams(shape=0.0)).validate()


def test_wage_deciles_even_split():
    d = wage_deciles(np.arange(100.0)[::-1])
    assert np.bincount(d).tolist() == [10] * 10
    assert d[0] == 9 and d[-1] == 0


def test_calendar_date():
    assert calendar_date((2001, 1), 0) == (2001, 1)
    assert calendar_date((2001, 1), 1) == (2001, 2)
    assert calendar_date((2001, 1), 230) == (2020, 3)
    assert calendar_date((2001, 11), 3) == (2002, 2)


def test_monthly_wage_tracks_hourly():
    a = AgentState(0, "n", 30, "t", 12.5)
    a.hourly_wage *= 1.03
    assert a.monthly_wage == 168 * a.hourly_wage


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"tax_schedule": {"brackets": [0, 500, 400], "rates": [0.1, 0.2, 0.3]}}, "tax_schedule.brackets"),
        ({"num_agents": 0}, "num_agents"),
        ({"num_months": 6}, "num_months"),
        ({"policy": {"name": "RL"}}, "policy.name"),
        ({"policy": {"beta": 2.0}}, "policy.beta"),
        ({"bogus": 1}, "bogus"),
        ({"policy": {"llm": {"nope": 1}}}, "policy.llm.nope"),
        ({"interventions": [{"date": "2030-01", "sentence": "x"}]}, "interventions[0].date"),
    ],
)
def test_config_errors_name_the_field(patch, field):
    with pytest.raises(ConfigError, match=field.replace("[", r"\[").replace("]", r"\]")):
        SimConfig.from_dict(patch)


def test_config_roundtrip(tmp_path):
    cfg = SimConfig(seed=11, num_months=36)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = SimConfig.from_json(path)
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


def test_tax_schedule_csv(tmp_path):
    path = tmp_path / "tax.csv"
    path.write_text("bracket,rate\n0,0.1\n1000,0.2\n")
    sched = TaxSchedule.from_csv(path)
    assert sched.brackets == (0.0, 1000.0)
    assert sched.rates == (0.1, 0.2)


@pytest.mark.parametrize("name, header", [("ages.csv", ["age", "weight"]), ("names.csv", ["name"]), ("jobs.csv", ["decile", "title"])])
def test_bundled_data_format(name, header):
    with resources.files("macroabm.data").joinpath(name).open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == header
    assert all(len(r) == len(header) for r in rows[1:])
