"""Excess error of the collection learner on nested threshold windows.

The data come from a threshold at 12 with 30% label noise; the classes are
threshold windows around 4 of growing width, so only the wide windows
contain the best threshold.
"""

# %%
import statistics

from collearn.experiments import TREND, trend_trial

print(TREND)

# %%
for m in (32, 128, 512):
    runs = [trend_trial(m, seed) for seed in range(10)]
    picks = sorted({r[3] for r in runs})
    print(f"m={m:4d}  median excess {statistics.median(r[2] for r in runs):.4f}  classes picked {picks}")
