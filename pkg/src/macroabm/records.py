"""Per-month run records and their CSV form.

``months.csv`` is long format: one row per (month, agent), with the month-level
columns repeated on every row. Floats are written with ``repr`` so a reload
gives back the identical values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class AgentSnapshot:
    agent_id: int
    work_propensity: float
    consumption_propensity: float
    worked: bool
    income: float
    tax: float
    redistribution: float
    consumption: float
    demand: float
    savings: float
    savings_start: float
    hourly_wage: float
    interest: float = 0.0


@dataclass
class MonthRecord:
    month_index: int
    date: tuple[int, int]
    price: float
    interest_rate: float
    production: float
    total_demand: float
    imbalance: float
    employed_count: int
    inventory: float
    next_price: float
    mean_wage: float
    fallback_count: int = 0
    agents: list[AgentSnapshot] = field(default_factory=list)


MONTH_COLUMNS = [
    "month_index",
    "year",
    "month",
    "price",
    "interest_rate",
    "production",
    "total_demand",
    "imbalance",
    "employed_count",
    "inventory",
    "next_price",
    "mean_wage",
    "fallback_count",
]
AGENT_COLUMNS = [f.name for f in fields(AgentSnapshot)]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_months_csv(records: list[MonthRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MONTH_COLUMNS + AGENT_COLUMNS)
        for rec in records:
            head = [
                rec.month_index,
                rec.date[0],
                rec.date[1],
                rec.price,
                rec.interest_rate,
                rec.production,
                rec.total_demand,
                rec.imbalance,
                rec.employed_count,
                rec.inventory,
                rec.next_price,
                rec.mean_wage,
                rec.fallback_count,
            ]
            for snap in rec.agents:
                w.writerow([_fmt(v) for v in head] + [_fmt(getattr(snap, c)) for c in AGENT_COLUMNS])


def read_months_csv(path: str | Path) -> list[MonthRecord]:
    records: dict[int, MonthRecord] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            m = int(row["month_index"])
            if m not in records:
                records[m] = MonthRecord(
                    month_index=m,
                    date=(int(row["year"]), int(row["month"])),
                    price=float(row["price"]),
                    interest_rate=float(row["interest_rate"]),
                    production=float(row["production"]),
                    total_demand=float(row["total_demand"]),
                    imbalance=float(row["imbalance"]),
                    employed_count=int(row["employed_count"]),
                    inventory=float(row["inventory"]),
                    next_price=float(row["next_price"]),
                    mean_wage=float(row["mean_wage"]),
                    fallback_count=int(row["fallback_count"]),
                )
            records[m].agents.append(
                AgentSnapshot(
                    agent_id=int(row["agent_id"]),
                    work_propensity=float(row["work_propensity"]),
                    consumption_propensity=float(row["consumption_propensity"]),
                    worked=row["worked"] == "1",
                    income=float(row["income"]),
                    tax=float(row["tax"]),
                    redistribution=float(row["redistribution"]),
                    consumption=float(row["consumption"]),
                    demand=float(row["demand"]),
                    savings=float(row["savings"]),
                    savings_start=float(row["savings_start"]),
                    hourly_wage=float(row["hourly_wage"]),
                    interest=float(row["interest"]),
                )
            )
    return [records[m] for m in sorted(records)]


def write_rows(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
