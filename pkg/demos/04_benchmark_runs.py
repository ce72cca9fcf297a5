"""The four benchmark searches: sin(5x)/x with 12 points, then the 2-D
functions with a budget of 50.

Run:  python3 demos/04_benchmark_runs.py [--quick]
"""

import argparse
import time

import numpy as np

from lio import GridSampler, KernelConfig, LoopConfig, ObjectiveWeights, get_benchmark, noisy_oracle, run, true_optima

parser = argparse.ArgumentParser()
parser.add_argument("--quick", action="store_true", help="only the 1-D example")
args = parser.parse_args()


def show(name, trace, elapsed):
    opt = [p for p, _ in true_optima(name)]
    d_est = min(np.linalg.norm(trace.best_point - p) for p in opt)
    d_obs = min(np.linalg.norm(trace.best_observed_point - p) for p in opt)
    print(f"{name:<20} {len(trace.final_dataset):>3} points  {elapsed:5.1f}s")
    print(f"  posterior-mean maximum {np.round(trace.best_point, 3)} (est {trace.best_est_value:.4g}), "
          f"{d_est:.3f} from an optimum")
    print(f"  best observation       {np.round(trace.best_observed_point, 3)} "
          f"(value {trace.best_observed_value:.4g}), {d_obs:.3f} from an optimum")


spec = get_benchmark("sinc5")
cfg = LoopConfig(spec.domain, GridSampler(0.01), KernelConfig(0.1), KernelConfig(0.1),
                 weights=ObjectiveWeights(1, 1, 1), budget=11)
t0 = time.perf_counter()
trace = run(cfg, noisy_oracle("sinc5"))
show("sinc5", trace, time.perf_counter() - t0)
print("  picks:", [round(float(r.chosen_point[0]), 2) for r in trace.records])

if not args.quick:
    for name in ("goldstein_price_inv", "branin_inv", "camel6_inv"):
        spec = get_benchmark(name)
        cfg = LoopConfig(spec.domain, GridSampler(spec.reference_grid_step), KernelConfig(0.5), KernelConfig(0.1),
                         weights=ObjectiveWeights(4, 2, 3), budget=50)
        t0 = time.perf_counter()
        trace = run(cfg, noisy_oracle(name))
        show(name, trace, time.perf_counter() - t0)
