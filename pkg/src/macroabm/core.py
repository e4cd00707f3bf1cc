"""Domain types, configuration, RNG substreams and population initialization."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import types
import typing
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

HOURS_PER_MONTH = 168
DEFAULT_CITY = "New York City, New York"

STREAM_NAMES = (
    "work_sampling",
    "wage_adjust",
    "price_adjust",
    "consumption_order",
    "job_offers",
    "profile_init",
)

POLICY_NAMES = ("LEN", "CATS", "Composite", "LLM", "Scripted")

# 2018 U.S. federal brackets divided by 12
DEFAULT_BRACKETS = (0.00, 808.33, 3289.58, 7016.67, 13393.75, 17008.33, 42525.00)
DEFAULT_RATES = (0.10, 0.12, 0.22, 0.24, 0.32, 0.35, 0.37)

COVID_SENTENCE = (
    "In response to the large-scale outbreak of COVID-19 in the United States, "
    "the federal government has declared a national emergency since March 2020."
)


class ConfigError(ValueError):
    """Invalid simulation configuration. The message names the offending field."""


# ---------------------------------------------------------------------------
# Agents and world
# ---------------------------------------------------------------------------


@dataclass
class AgentState:
    id: int
    name: str
    age: int
    job_title: str
    hourly_wage: float
    city: str = DEFAULT_CITY
    savings: float = 0.0
    worked: bool = True
    income: float = 0.0
    work_propensity: float = 0.0
    consumption_propensity: float = 0.0
    intended_consumption: float = 0.0
    realized_consumption: float = 0.0
    realized_demand: float = 0.0
    intended_demand: float = 0.0
    tax_paid: float = 0.0
    redistribution_received: float = 0.0

    @property
    def monthly_wage(self) -> float:
        return HOURS_PER_MONTH * self.hourly_wage


@dataclass
class EconomyState:
    inventory: float
    price: float
    interest_rate: float
    start_date: tuple[int, int] = (2001, 1)
    month_index: int = 0
    production_this_month: float = 0.0
    price_history: list[float] = field(default_factory=list)
    mean_wage_history: list[float] = field(default_factory=list)
    employment_history: list[int] = field(default_factory=list)
    initial_price: float = 0.0
    initial_mean_wage: float = 0.0

    @property
    def calendar_date(self) -> tuple[int, int]:
        return calendar_date(self.start_date, self.month_index)


def calendar_date(start: tuple[int, int], month_index: int) -> tuple[int, int]:
    year, month = start
    total = year * 12 + (month - 1) + month_index
    return total // 12, total % 12 + 1


# ---------------------------------------------------------------------------
# Parameters and configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaxSchedule:
    brackets: tuple[float, ...] = DEFAULT_BRACKETS
    rates: tuple[float, ...] = DEFAULT_RATES

    def __post_init__(self):
        object.__setattr__(self, "brackets", tuple(float(b) for b in self.brackets))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))

    def validate(self, prefix: str = "tax_schedule") -> None:
        b, r = self.brackets, self.rates
        if not b:
            raise ConfigError(f"{prefix}.brackets: must not be empty")
        if len(b) != len(r):
            raise ConfigError(f"{prefix}.rates: expected {len(b)} rates, got {len(r)}")
        if b[0] != 0.0:
            raise ConfigError(f"{prefix}.brackets: first bracket must be 0")
        if any(hi <= lo for lo, hi in zip(b, b[1:])):
            raise ConfigError(f"{prefix}.brackets: must be strictly increasing")
        if any(not 0.0 <= x <= 1.0 for x in r):
            raise ConfigError(f"{prefix}.rates: every rate must lie in [0, 1]")

    @classmethod
    def from_csv(cls, path: str | Path) -> "TaxSchedule":
        """Load a ``bracket,rate`` CSV file."""
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        schedule = cls(
            brackets=tuple(float(row["bracket"]) for row in rows),
            rates=tuple(float(row["rate"]) for row in rows),
        )
        schedule.validate()
        return schedule


@dataclass(frozen=True)
class MarketParams:
    max_wage_rate: float = 0.05
    max_price_rate: float = 0.10
    productivity: float = 1.0
    hours_per_month: int = HOURS_PER_MONTH

    def validate(self, prefix: str = "market") -> None:
        for f in dataclasses.fields(self):
            if getattr(self, f.name) <= 0:
                raise ConfigError(f"{prefix}.{f.name}: must be > 0")
        if self.hours_per_month != HOURS_PER_MONTH:
            raise ConfigError(f"{prefix}.hours_per_month: fixed at {HOURS_PER_MONTH}")


@dataclass(frozen=True)
class TaylorParams:
    natural_rate: float = 0.01
    target_inflation: float = 0.02
    natural_unemployment: float = 0.04
    inflation_coeff: float = 0.5
    unemployment_coeff: float = 0.5

    def validate(self, prefix: str = "taylor") -> None:
        if self.inflation_coeff < 0:
            raise ConfigError(f"{prefix}.inflation_coeff: must be >= 0")
        if self.unemployment_coeff < 0:
            raise ConfigError(f"{prefix}.unemployment_coeff: must be >= 0")


@dataclass(frozen=True)
class ParetoParams:
    """Classical Pareto for hourly wages: support [scale, inf), tail index ``shape``."""

    scale: float = 15.0
    shape: float = 1.8

    def validate(self, prefix: str = "wage_pareto") -> None:
        if self.shape <= 0:
            raise ConfigError(f"{prefix}.shape: must be > 0")
        if self.scale <= 0:
            raise ConfigError(f"{prefix}.scale: must be > 0")


@dataclass(frozen=True)
class MockConfig:
    # "econ-rational" reads the prompt; "constant" always answers work/consumption
    responder: str = "econ-rational"
    script: str | None = None
    work: float = 0.5
    consumption: float = 0.5
    shock_keywords: tuple[str, ...] = ("national emergency",)


@dataclass(frozen=True)
class LLMConfig:
    client: str = "mock"
    model: str = "gpt-3.5-turbo-0613"
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    api_key_env: str = "ECON_LLM_API_KEY"
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 3
    parse_retries: int = 3
    parallelism: int = 1
    memory_months: int = 1
    mock: MockConfig = field(default_factory=MockConfig)

    def validate(self, prefix: str = "policy.llm") -> None:
        if self.client not in ("mock", "http"):
            raise ConfigError(f"{prefix}.client: must be 'mock' or 'http'")
        if self.memory_months < 0:
            raise ConfigError(f"{prefix}.memory_months: must be >= 0")
        if self.parallelism < 1:
            raise ConfigError(f"{prefix}.parallelism: must be >= 1")
        if self.max_retries < 0 or self.parse_retries < 0:
            raise ConfigError(f"{prefix}.max_retries: must be >= 0")
        if self.mock.responder not in ("econ-rational", "constant", "script"):
            raise ConfigError(f"{prefix}.mock.responder: unknown responder {self.mock.responder!r}")


@dataclass(frozen=True)
class ScriptedConfig:
    # "econ-rational" or "constant"
    kind: str = "econ-rational"
    work: float = 1.0
    consumption: float = 0.0


@dataclass(frozen=True)
class PolicyConfig:
    name: str = "LEN"
    beta: float = 0.1
    gamma: float = 0.1
    h: float = 1.0
    epsilon_savings: float = 1e-6
    mix_weights: tuple[float, float] = (0.5, 0.5)
    llm: LLMConfig = field(default_factory=LLMConfig)
    scripted: ScriptedConfig = field(default_factory=ScriptedConfig)

    def validate(self, prefix: str = "policy") -> None:
        if self.name not in POLICY_NAMES:
            raise ConfigError(f"{prefix}.name: must be one of {', '.join(POLICY_NAMES)}")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"{prefix}.beta: must lie in [0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"{prefix}.gamma: must lie in [0, 1]")
        if self.h <= 0:
            raise ConfigError(f"{prefix}.h: must be > 0")
        if self.epsilon_savings <= 0:
            raise ConfigError(f"{prefix}.epsilon_savings: must be > 0")
        if len(self.mix_weights) != 2 or min(self.mix_weights) < 0 or sum(self.mix_weights) <= 0:
            raise ConfigError(f"{prefix}.mix_weights: need two non-negative weights")
        if self.scripted.kind not in ("econ-rational", "constant"):
            raise ConfigError(f"{prefix}.scripted.kind: unknown kind {self.scripted.kind!r}")
        self.llm.validate(f"{prefix}.llm")


@dataclass(frozen=True)
class Intervention:
    date: tuple[int, int]
    sentence: str


@dataclass(frozen=True)
class DataFiles:
    ages: str | None = None
    names: str | None = None
    jobs: str | None = None


@dataclass(frozen=True)
class SimConfig:
    num_agents: int = 100
    num_months: int = 240
    seed: int = 0
    start_date: tuple[int, int] = (2001, 1)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    tax_schedule: TaxSchedule = field(default_factory=TaxSchedule)
    market: MarketParams = field(default_factory=MarketParams)
    taylor: TaylorParams = field(default_factory=TaylorParams)
    wage_pareto: ParetoParams = field(default_factory=ParetoParams)
    interventions: tuple[Intervention, ...] = ()
    initial_interest_rate: float | None = None
    # "end_of_month": trade at the quoted price, then adjust; "before_matching": adjust first
    price_adjust_timing: str = "end_of_month"
    data_files: DataFiles = field(default_factory=DataFiles)
    output_dir: str | None = None

    def validate(self) -> "SimConfig":
        if self.num_agents < 1:
            raise ConfigError("num_agents: must be >= 1")
        if self.num_months < 12:
            raise ConfigError("num_months: must be >= 12")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed: must be a 64-bit unsigned integer")
        if not 1 <= self.start_date[1] <= 12:
            raise ConfigError("start_date: month must lie in 1..12")
        self.policy.validate()
        self.tax_schedule.validate()
        self.market.validate()
        self.taylor.validate()
        self.wage_pareto.validate()
        end = calendar_date(self.start_date, self.num_months - 1)
        for i, iv in enumerate(self.interventions):
            if not self.start_date <= tuple(iv.date) <= end:
                raise ConfigError(f"interventions[{i}].date: outside the simulation horizon")
            if not iv.sentence:
                raise ConfigError(f"interventions[{i}].sentence: must not be empty")
        if self.price_adjust_timing not in ("end_of_month", "before_matching"):
            raise ConfigError("price_adjust_timing: must be 'end_of_month' or 'before_matching'")
        if self.initial_interest_rate is not None and self.initial_interest_rate < 0:
            raise ConfigError("initial_interest_rate: must be >= 0")
        return self

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return _to_jsonable(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        return _from_dict(cls, data, "").validate()

    @classmethod
    def from_json(cls, path: str | Path) -> "SimConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        tax = data.get("tax_schedule")
        if isinstance(tax, str):
            data = dict(data, tax_schedule=dataclasses.asdict(TaxSchedule.from_csv(Path(path).parent / tax)))
        return cls.from_dict(data)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _to_jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [_to_jsonable(x) for x in obj]
    return obj


def _parse_date(value, where: str) -> tuple[int, int]:
    if isinstance(value, str):
        try:
            y, m = value.replace(".", "-").split("-")
            return int(y), int(m)
        except ValueError:
            raise ConfigError(f"{where}: expected 'YYYY-MM', got {value!r}") from None
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return int(value[0]), int(value[1])
    raise ConfigError(f"{where}: expected 'YYYY-MM' or [year, month]")


def _unwrap_optional(hint):
    if typing.get_origin(hint) in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return hint


def _from_dict(cls, data, prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'config'}: expected an object")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{prefix}{unknown[0]}: unknown key")
    kwargs: dict[str, Any] = {}
    for name, value in data.items():
        where = f"{prefix}{name}"
        hint = hints[name]
        target = _unwrap_optional(hint)
        if value is None:
            kwargs[name] = None
        elif name in ("date", "start_date"):
            kwargs[name] = _parse_date(value, where)
        elif dataclasses.is_dataclass(target):
            kwargs[name] = _from_dict(target, value, where + ".")
        elif name == "interventions":
            if not isinstance(value, list):
                raise ConfigError(f"{where}: expected a list")
            kwargs[name] = tuple(_from_dict(Intervention, v, f"{where}[{i}].") for i, v in enumerate(value))
        elif typing.get_origin(target) is tuple:
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{where}: expected a list")
            kwargs[name] = tuple(value)
        elif target is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{where}: expected a number")
            kwargs[name] = float(value)
        elif target is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{where}: expected an integer")
            kwargs[name] = value
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{prefix or 'config'}: {exc}") from exc


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------


def derive_stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator keyed by ``(seed, name)``.

    The name is hashed into the seed sequence entropy, so each stream is
    unaffected by how many draws any other stream makes.
    """
    key = int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), key])))


class RngStreams:
    """The named substreams used by one simulation run."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        for name in STREAM_NAMES:
            setattr(self, name, derive_stream(self.seed, name))

    work_sampling: np.random.Generator
    wage_adjust: np.random.Generator
    price_adjust: np.random.Generator
    consumption_order: np.random.Generator
    job_offers: np.random.Generator
    profile_init: np.random.Generator


# ---------------------------------------------------------------------------
# Static profile data
# ---------------------------------------------------------------------------


def _open_data(path: str | None, default: str):
    if path is not None:
        return open(path, newline="", encoding="utf-8")
    return resources.files("macroabm.data").joinpath(default).open("r", newline="", encoding="utf-8")


def load_ages(path: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    with _open_data(path, "ages.csv") as fh:
        rows = list(csv.DictReader(fh))
    ages = np.array([int(r["age"]) for r in rows])
    weights = np.array([float(r["weight"]) for r in rows])
    return ages, weights / weights.sum()


def load_names(path: str | None = None) -> list[tuple[str, str]]:
    """(name, city) pairs; the city column is optional."""
    with _open_data(path, "names.csv") as fh:
        rows = list(csv.DictReader(fh))
    return [(r["name"], r.get("city") or DEFAULT_CITY) for r in rows]


def load_job_titles(path: str | None = None) -> list[list[str]]:
    """Titles per wage decile; index 0 is the lowest decile."""
    table: dict[int, list[str]] = {}
    with _open_data(path, "jobs.csv") as fh:
        for r in csv.DictReader(fh):
            table.setdefault(int(r["decile"]), []).append(r["title"])
    if sorted(table) != list(range(1, 11)):
        raise ConfigError("data_files.jobs: need titles for deciles 1..10")
    return [table[d] for d in range(1, 11)]


def wage_deciles(wages) -> np.ndarray:
    """Decile index (0..9) of every wage by rank within the population."""
    wages = np.asarray(wages, dtype=float)
    n = len(wages)
    ranks = np.empty(n, dtype=int)
    ranks[np.argsort(wages, kind="stable")] = np.arange(n)
    return (ranks * 10) // n


def sample_hourly_wages(params: ParetoParams, n: int, rng: np.random.Generator) -> np.ndarray:
    params.validate()
    # numpy draws the Lomax form; shift and scale to the classical Pareto
    return params.scale * (1.0 + rng.pareto(params.shape, size=n))


def init_population(config: SimConfig, rng: RngStreams) -> tuple[list[AgentState], EconomyState]:
    """Draw the agent profiles and the initial world state."""
    n = config.num_agents
    stream = rng.profile_init
    wages = sample_hourly_wages(config.wage_pareto, n, stream)

    ages, age_weights = load_ages(config.data_files.ages)
    names = load_names(config.data_files.names)
    titles = load_job_titles(config.data_files.jobs)

    agent_ages = stream.choice(ages, size=n, p=age_weights)
    name_order = stream.permutation(len(names))
    deciles = wage_deciles(wages)

    agents = []
    for i in range(n):
        name, city = names[name_order[i % len(names)]]
        if i >= len(names):
            name = f"{name} {i // len(names) + 1}"
        options = titles[deciles[i]]
        title = options[int(stream.integers(len(options)))]
        agents.append(
            AgentState(
                id=i,
                name=name,
                age=int(agent_ages[i]),
                job_title=title,
                hourly_wage=float(wages[i]),
                city=city,
            )
        )
    price = mean_hourly_wage(agents)
    rate = config.taylor.natural_rate if config.initial_interest_rate is None else config.initial_interest_rate
    world = EconomyState(
        inventory=0.0,
        price=price,
        interest_rate=rate,
        start_date=tuple(config.start_date),
        initial_price=price,
        initial_mean_wage=price,
    )
    return agents, world


def mean_hourly_wage(agents: list[AgentState]) -> float:
    total = 0.0
    for a in agents:
        total += a.hourly_wage
    return total / len(agents)
