"""How many random samples guarantee a near-best value with high confidence?

Run:  python3 demos/03_sample_bound.py
"""

import numpy as np

from lio import min_sample_count
from lio.benchmarks import sinc5

for eps, delta in [(0.1, 0.1), (0.05, 0.05), (0.01, 0.01)]:
    print(f"eps={eps:<5} delta={delta:<5} -> N = {min_sample_count(eps, delta)}")

# Check eps = delta = 0.1 empirically on sin(5x)/x over [0.1, 3.9].
n = min_sample_count(0.1, 0.1)
rng = np.random.default_rng(0)
levels = sinc5(np.linspace(0.1, 3.9, 100_001)[:, None])
fails = 0
for _ in range(2000):
    best = sinc5(rng.uniform(0.1, 3.9, (n, 1))).max()
    fails += np.mean(levels > best) > 0.1
print(f"with N = {n}: best sample beaten on >10% of the domain in {fails / 2000:.3f} of trials (bound: 0.1)")
