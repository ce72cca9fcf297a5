"""Fit a GP to a handful of sin(5x)/x samples and watch the uncertainty shrink.

Run:  python3 demos/01_gp_regression.py [--plot out.png]
"""

import argparse

import numpy as np

from lio import Dataset, KernelConfig, fit, predict
from lio.benchmarks import sinc5

parser = argparse.ArgumentParser()
parser.add_argument("--plot", help="write a figure (needs matplotlib)")
args = parser.parse_args()

xs = np.linspace(0.1, 3.9, 381).reshape(-1, 1)
truth = sinc5(xs)

# Observations arrive one at a time; the kernel is fixed, nothing is learned.
order = [0.1, 3.9, 2.0, 1.0, 3.0, 0.5, 1.5]
for n in (1, 3, 7):
    pts = np.array(order[:n]).reshape(-1, 1)
    model = fit(Dataset.from_points(pts, sinc5(pts), noise_var=0.01), KernelConfig(0.1))
    mean, var = predict(model, xs)
    err = np.max(np.abs(mean - truth))
    print(f"{n} points: mean variance {var.mean():.3f}, max |f - f_hat| {err:.3f}, "
          f"argmax f_hat at x = {xs[np.argmax(mean), 0]:.2f}")

if args.plot:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sd = np.sqrt(var)
    plt.plot(xs, truth, "k--", label="f")
    plt.plot(xs, mean, label="posterior mean")
    plt.fill_between(xs[:, 0], mean - 2 * sd, mean + 2 * sd, alpha=0.2, label="±2 sd")
    plt.scatter(pts, sinc5(pts), color="C3", zorder=3, label="data")
    plt.legend()
    plt.savefig(args.plot, dpi=120)
    print(f"wrote {args.plot}")
