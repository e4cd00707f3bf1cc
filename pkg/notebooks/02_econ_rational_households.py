"""
A scripted "econ-rational" household
====================================

The scripted rule supplies more labor when its wage rises and after losing
its job, and spends less when unemployment has been high over the past year.
That is enough to bend the Phillips curve downward. The second half runs the
per-agent decision regressions and prints the significance table.

    python notebooks/02_econ_rational_households.py
"""

import numpy as np

from macroabm import SimConfig, run_simulation
from macroabm.metrics import REGRESSORS, okun_points, pearson, phillips_points

cfg = SimConfig.from_json("configs/econ_rational.json")

# Same rule, several seeds: the sign of both regularities should not depend on luck.
print(f"{'seed':>4} {'Phillips r':>11} {'p':>9} {'Okun r':>8} {'p':>9} {'mean u':>7}")
for seed in range(5):
    result = run_simulation(cfg.replace(seed=seed))
    r_ph, p_ph = pearson(*zip(*phillips_points(result.years)))
    r_ok, p_ok = pearson(*zip(*okun_points(result.years)[0]))
    mean_u = np.mean([y.unemployment for y in result.years])
    print(f"{seed:>4} {r_ph:11.3f} {p_ph:9.2g} {r_ok:8.3f} {p_ok:9.2g} {mean_u:7.3f}")

# Decision regressions: z-scored OLS of each agent's work and consumption
# propensities on wage, last month's consumption, tax and credit, price,
# savings and the interest rate. The table counts agents with p <= 0.05.
result = run_simulation(cfg)
table = {t: {k: 0 for k in REGRESSORS} for t in ("work", "consumption")}
for res in result.regressions:
    if not res.skipped:
        for k in REGRESSORS:
            table[res.target][k] += res.p_values[k] <= 0.05

print()
print(f"{'':>12}" + "".join(f"{k:>7}" for k in REGRESSORS))
for target, row in table.items():
    print(f"{target:>12}" + "".join(f"{row[k]:>7}" for k in REGRESSORS))

# The rule never looks at the price or the interest rate directly, so any
# significance there comes from their correlation with the labor market.
