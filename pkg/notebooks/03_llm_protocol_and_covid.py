"""
The LLM household protocol, offline
===================================

Every month each household gets a prompt describing its situation and
answers with a JSON decision; at every quarter end it is asked to reflect.
Here the model is a deterministic mock that reads the prompt, so the whole
protocol runs offline. The last part switches on the COVID announcement in
March 2020 and compares unemployment with and without it.

Set ECON_LLM_API_KEY and use configs/live_llm.json to talk to a real
OpenAI-compatible endpoint instead (about 24 000 chats for a full run).

    python notebooks/03_llm_protocol_and_covid.py
"""

from macroabm import SimConfig, run_simulation
from macroabm.core import PolicyConfig

# A small run: 10 households, two years
cfg = SimConfig(num_agents=10, num_months=24, seed=1, policy=PolicyConfig(name="LLM"))
result = run_simulation(cfg)
policy = result.simulation.policy
print("chats issued:", policy.chat_counts, "| parse fallbacks:", policy.fallback_count)
print("largest memory window:", policy.max_memory_size, "units")

# One decision dialogue and one reflection from the log
decision = next(r for r in policy.dialogue_log if r["kind"] == "decision" and r["month"] == 1)
reflection = next(r for r in policy.dialogue_log if r["kind"] == "reflection")
print("\n--- prompt (agent 0, month 2) ---\n" + decision["prompt"])
print("--- reply ---\n" + decision["response"])
print("\n--- reflection reply (month 3) ---\n" + reflection["response"])

# COVID: the announcement sentence is appended to every prompt from 2020-03 on.
# The mock household works a lot less once it reads "national emergency".
covid = SimConfig.from_json("configs/covid.json")
shocked = run_simulation(covid)
calm = run_simulation(covid.replace(interventions=()))

print(f"\n{'year':>5} {'u (covid)':>10} {'u (none)':>10}")
for a, b in zip(shocked.years[-4:], calm.years[-4:]):
    year = covid.start_date[0] + a.year_index - 1
    print(f"{year:>5} {a.unemployment:10.3f} {b.unemployment:10.3f}")
