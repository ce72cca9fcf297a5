"""Entropy bookkeeping: the 64-outcome guessing game, and which GP candidate is
most informative under the greedy and the exact criteria.

Run:  python3 demos/02_information.py
"""

import numpy as np

from lio import CandidateSet, Dataset, KernelConfig, bisection_demo, exclude_observed, fit, predict
from lio.information import exact_info_objectives, info_report, select_max_info_exact, select_max_variance

bits, split = bisection_demo(64)
print(f"guess a number in 1..64: {bits:.0f} bits of uncertainty; best first question splits at p = {split:.3f}")

data = Dataset.from_points([[0.0], [0.3]], [0.2, -0.4], noise_var=0.01)
model = fit(data, KernelConfig(0.02))
grid = exclude_observed(CandidateSet(np.linspace(0, 1, 41).reshape(-1, 1), "grid", 0.025), data).points

_, var = predict(model, grid)
i_var = select_max_variance(model, grid)
i_exact = select_max_info_exact(model, grid)
obj = exact_info_objectives(model, grid)
print(f"greedy pick: x = {grid[i_var, 0]:.3f} (variance {var[i_var]:.3f})")
print(f"exact pick:  x = {grid[i_exact, 0]:.3f} (variance {var[i_exact]:.3f})")
print(f"rank of the greedy pick under the exact objective: {int(np.sum(obj < obj[i_var]))} of {len(grid)}")
# The exact objective sums ln|C_q|, which grows with the candidate's own
# variance, so it tends to favour candidates close to existing data.

r = info_report(model, grid)
print(f"mean variance {r.mean_variance:.3f}, mean entropy {r.mean_entropy:.3f} nats")
