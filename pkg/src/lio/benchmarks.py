"""Test objectives, in the orientation used for maximization.

Goldstein-Price, Branin and the six-hump camel are minimization problems in
the literature; the ``*_inv`` variants here are their negations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .gp_core import Domain


def sinc5(x):
    x = np.asarray(x, dtype=float)
    return np.sin(5.0 * x[..., 0]) / x[..., 0]


def goldstein_price(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1**2 - 14 * x2 + 6 * x1 * x2 + 3 * x2**2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (18 - 32 * x1 + 12 * x1**2 + 48 * x2 - 36 * x1 * x2 + 27 * x2**2)
    return a * b


def branin(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    b = 5.1 / (4 * np.pi**2)
    c = 5 / np.pi
    t = 1 / (8 * np.pi)
    return (x2 - b * x1**2 + c * x1 - 6) ** 2 + 10 * (1 - t) * np.cos(x1) + 10


def camel6(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (4 - 2.1 * x1**2 + x1**4 / 3) * x1**2 + x1 * x2 + (-4 + 4 * x2**2) * x2**2


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    domain: Domain
    evaluate: Callable[[np.ndarray], np.ndarray]
    true_optima: tuple
    reference_grid_step: float


def _grid_argmax_sinc5():
    xs = np.linspace(0.1, 3.9, 381)
    vals = sinc5(xs[:, None])
    i = int(np.argmax(vals))
    return ((np.array([xs[i]]), float(vals[i])),)


def _opt(point, func):
    p = np.asarray(point, dtype=float)
    return p, float(func(p))


def _build_registry():
    gp_inv = lambda x: -goldstein_price(x)  # noqa: E731
    br_inv = lambda x: -branin(x)  # noqa: E731
    cm_inv = lambda x: -camel6(x)  # noqa: E731
    # Branin minimizers are (-pi, 12.275), (pi, 2.275), (9.42478, 2.475)
    return {
        "sinc5": BenchmarkSpec("sinc5", Domain([0.1], [3.9]), sinc5, _grid_argmax_sinc5(), 0.01),
        "goldstein_price_inv": BenchmarkSpec(
            "goldstein_price_inv", Domain([-2, -2], [2, 2]), gp_inv,
            (_opt([0.0, -1.0], gp_inv),), 0.05,
        ),
        "branin_inv": BenchmarkSpec(
            "branin_inv", Domain([-5, 0], [10, 15]), br_inv,
            (
                _opt([-np.pi, 12.275], br_inv),
                _opt([np.pi, 2.275], br_inv),
                _opt([3 * np.pi, 2.475], br_inv),
            ),
            0.2,
        ),
        "camel6_inv": BenchmarkSpec(
            "camel6_inv", Domain([-2, -2], [2, 2]), cm_inv,
            (_opt([-0.08984201, 0.71265640], cm_inv), _opt([0.08984201, -0.71265640], cm_inv)),
            0.05,
        ),
    }


REGISTRY = _build_registry()


def get_benchmark(name: str) -> BenchmarkSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown benchmark {name!r}; known: {sorted(REGISTRY)}") from None


def eval_benchmark(name: str, x) -> float:
    spec = get_benchmark(name)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (spec.domain.dim,):
        raise InvalidArgumentError(f"{name} expects a {spec.domain.dim}-vector, got shape {x.shape}")
    if not spec.domain.contains(x, tol=1e-9):
        raise InvalidArgumentError(f"{x} lies outside the {name} domain")
    return float(spec.evaluate(x))


def true_optima(name: str) -> list[tuple[np.ndarray, float]]:
    return [(p.copy(), v) for p, v in get_benchmark(name).true_optima]


def noisy_oracle(name: str, noise_var: float = 0.0, seed: int = 0) -> Callable[[np.ndarray], float]:
    """Benchmark oracle corrupted by Gaussian noise of variance ``noise_var``.

    The k-th call always receives the k-th draw of the seeded stream, so two
    oracles built with the same seed produce identical noise sequences.
    """
    if noise_var < 0:
        raise InvalidArgumentError("noise_var must be nonnegative")
    get_benchmark(name)
    rng = np.random.default_rng(seed)
    scale = float(np.sqrt(noise_var))

    def oracle(x) -> float:
        value = eval_benchmark(name, x)
        if scale > 0:
            value += scale * float(rng.standard_normal())
        return value

    return oracle
