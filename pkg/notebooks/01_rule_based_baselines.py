"""
Rule-based households
=====================

Twenty simulated years of 100 households under the two classic consumption
rules (LEN and CATS) and a 50/50 mix of them. Prints the yearly indicators
and the two textbook regularities for each run.

    python notebooks/01_rule_based_baselines.py
"""

import numpy as np

from macroabm import SimConfig, run_simulation
from macroabm.core import PolicyConfig
from macroabm.metrics import okun_points, pearson, phillips_points

SEED = 7

# The three baselines differ only in the consumption rule; the work rule is shared.
runs = {}
for name in ("LEN", "CATS", "Composite"):
    cfg = SimConfig(num_agents=100, num_months=240, seed=SEED, policy=PolicyConfig(name=name))
    runs[name] = run_simulation(cfg)

# Yearly table for the LEN run
years = runs["LEN"].years
print("LEN, seed", SEED)
print(f"{'year':>4} {'unemp':>7} {'price infl':>10} {'wage infl':>10} {'real GDP':>14} {'rate':>6}")
for y in years:
    print(
        f"{y.year_index:>4} {y.unemployment:7.3f} {y.price_inflation:10.4f} "
        f"{y.wage_inflation:10.4f} {y.real_gdp:14.0f} {y.interest_rate:6.3f}"
    )

# Phillips: unemployment vs wage inflation. Okun: unemployment growth vs real GDP growth.
print()
print(f"{'policy':>10} {'Phillips r':>11} {'p':>9} {'Okun r':>8} {'p':>9} {'mean u':>7}")
for name, result in runs.items():
    r_ph, p_ph = pearson(*zip(*phillips_points(result.years)))
    r_ok, p_ok = pearson(*zip(*okun_points(result.years)[0]))
    mean_u = np.mean([y.unemployment for y in result.years])
    print(f"{name:>10} {r_ph:11.3f} {p_ph:9.2g} {r_ok:8.3f} {p_ok:9.2g} {mean_u:7.3f}")

# Rule-based households rarely show a downward-sloping Phillips curve: when few
# people work, inventories run short, demand exceeds supply and wages go up.
