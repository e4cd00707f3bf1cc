"""Decision and reflection prompt rendering."""

from __future__ import annotations

import math
from typing import Sequence

from macroabm.core import AgentState
from macroabm.policies import EconObservation

REFLECTION_QUESTION = (
    "Given the previous quarter's economic environment, reflect on the labor, consumption, "
    "and financial markets, as well as their dynamics. What conclusions have you drawn?"
)

PREAMBLE = (
    "You're {name}, a {age}-year-old individual living in {city}. "
    "As with all Americans, a portion of your monthly income is taxed by the federal government. "
    "This taxation system is tiered, income is taxed cumulatively within defined brackets, "
    "combined with a redistributive policy: after collection, the government evenly redistributes "
    "the tax revenue back to all citizens, irrespective of their earnings. "
    "Now it's {date}. "
)

EMPLOYED = (
    "In the previous month, you worked as a(an) {job}. "
    "If you continue working this month, your expected income will be ${income:.2f}{wage_trend}. "
)

UNEMPLOYED = (
    "In the previous month, you became unemployed and had no income. "
    "Now, you are invited to work as a(an) {job} with a monthly salary of ${income:.2f}{wage_trend}. "
)

WAGE_DOWN = ", which is decreased compared to the last month due to the deflation of the labor market"
WAGE_UP = ", which is increased compared to the last month due to the inflation of the labor market"

SHORTAGE = "Due to a shortage of essential goods, part of your planned demand could not be met. "

FISCAL = (
    "Besides, your consumption was ${consumption:.2f}. {shortage}"
    "Your tax deduction amounted to ${tax:.2f}. "
    "However, as part of the government's redistribution program, you received a credit of ${credit:.2f}. "
    "In this month, the government sets the brackets: {brackets} and their corresponding rates: {rates}. "
    "Income earned within each bracket is taxed only at that bracket's rate. "
)

PRICE_DOWN = (
    "Meanwhile, deflation has led to a price decrease in the consumption market, "
    "with the average price of essential goods now at ${price:.2f}. "
)
PRICE_UP = (
    "Meanwhile, inflation has led to a price increase in the consumption market, "
    "with the average price of essential goods now at ${price:.2f}. "
)
PRICE_FLAT = "Meanwhile, the average price of essential goods in the consumption market stands at ${price:.2f}. "

CLOSING = (
    "Your current savings account balance is ${savings:.2f}. "
    "Interest rates, as set by your bank, stand at {rate:.2f}%. "
    "{interventions}"
    "With all these factors in play, and considering aspects like your living costs, any future "
    "aspirations, and the broader economic trends, how is your willingness to work this month? "
    "Furthermore, how would you plan your expenditures on essential goods, keeping in mind goods price? "
    "Please share your decisions in a JSON format. The format should have two keys: 'work' (a value "
    "between 0 and 1 with intervals of 0.02, indicating the willingness or propensity to work) and "
    "'consumption' (a value between 0 and 1 with intervals of 0.02, indicating the proportion of all "
    "your savings and income you intend to spend on essential goods)."
)


class PromptError(ValueError):
    """A prompt field is missing or not renderable."""


def _trend(current: float, previous: float | None, down: str, up: str, flat: str) -> str:
    if previous is None or current == previous:
        return flat
    return up if current > previous else down


def _number_list(values: Sequence[float]) -> str:
    return "[" + ", ".join(f"{v:.2f}" for v in values) + "]"


def _render(template: str, **fields) -> str:
    for key, value in fields.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise PromptError(f"prompt field {key!r} is not finite: {value}")
        if value is None:
            raise PromptError(f"prompt field {key!r} is missing")
    try:
        return template.format(**fields)
    except KeyError as exc:
        raise PromptError(f"prompt field {exc.args[0]!r} is missing") from None


def build_decision_prompt(agent: AgentState, obs: EconObservation) -> str:
    """Render the monthly decision prompt for one agent. Pure function of its inputs."""
    year, month = obs.date
    text = _render(PREAMBLE, name=agent.name, age=agent.age, city=agent.city, date=f"{year}.{month:02d}")
    wage_trend = _trend(obs.expected_income, obs.prev_expected_income, WAGE_DOWN, WAGE_UP, "")
    job_template = EMPLOYED if obs.employed_last_month else UNEMPLOYED
    text += _render(job_template, job=agent.job_title, income=obs.expected_income, wage_trend=wage_trend)
    text += _render(
        FISCAL,
        consumption=obs.prev_consumption,
        shortage=SHORTAGE if obs.shortage_last_month else "",
        tax=obs.prev_tax,
        credit=obs.prev_redistribution,
        brackets=_number_list(obs.tax_schedule.brackets),
        rates=_number_list(obs.tax_schedule.rates),
    )
    text += _render(_trend(obs.price, obs.prev_price, PRICE_DOWN, PRICE_UP, PRICE_FLAT), price=obs.price)
    text += _render(
        CLOSING,
        savings=obs.savings,
        rate=obs.interest_rate * 100.0,
        interventions="".join(s + " " for s in obs.interventions),
    )
    return text


def build_reflection_prompt(quarter_dialogues: Sequence) -> str:
    """Quarter's decision dialogues as context, then the reflection question."""
    if len(quarter_dialogues) != 3:
        raise ValueError(f"reflection needs exactly 3 monthly dialogues, got {len(quarter_dialogues)}")
    parts = []
    for d in quarter_dialogues:
        parts.append(f"Month {d.month_index + 1}:\nEnvironment: {d.prompt_text}\nYour decision: {d.response_text}\n")
    return "\n".join(parts) + "\n" + REFLECTION_QUESTION
