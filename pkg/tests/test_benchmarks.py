import math

import numpy as np
import pytest

from lio.benchmarks import REGISTRY, eval_benchmark, get_benchmark, noisy_oracle, true_optima
from lio.errors import InvalidArgumentError
from lio.sampling import grid_sample


def test_registry_names():
    assert set(REGISTRY) == {"sinc5", "goldstein_price_inv", "branin_inv", "camel6_inv"}


@pytest.mark.parametrize(
    "name, x, value",
    [
        ("goldstein_price_inv", [0.0, -1.0], -3.0),
        ("branin_inv", [math.pi, 2.275], -0.397887),
        ("branin_inv", [-math.pi, 12.275], -0.397887),
        ("branin_inv", [3 * math.pi, 2.475], -0.397887),
        ("camel6_inv", [0.0898, -0.7126], 1.0316),
        ("camel6_inv", [-0.0898, 0.7126], 1.0316),
        ("sinc5", [1.0], math.sin(5.0)),
    ],
)
def test_known_values(name, x, value):
    assert eval_benchmark(name, x) == pytest.approx(value, abs=1e-4)


def test_goldstein_price_reference_location():
    # the location reported for the 2-D run, value -9.7524
    assert eval_benchmark("goldstein_price_inv", [-0.15, -1.05]) == pytest.approx(-9.7524, abs=1e-4)


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_optima_dominate_grid(name):
    spec = get_benchmark(name)
    grid = grid_sample(spec.domain, spec.reference_grid_step).points
    best = max(v for _, v in true_optima(name))
    assert np.max(spec.evaluate(grid)) <= best + 1e-9


def test_sinc5_optimum_is_grid_argmax():
    (p, v), = true_optima("sinc5")
    xs = np.linspace(0.1, 3.9, 38001)
    dense = np.sin(5 * xs) / xs
    assert p[0] == pytest.approx(xs[np.argmax(dense)], abs=1e-3)
    assert v == pytest.approx(math.sin(0.5) / 0.1)


def test_errors():
    with pytest.raises(InvalidArgumentError):
        get_benchmark("rosenbrock")
    with pytest.raises(InvalidArgumentError):
        eval_benchmark("branin_inv", [0.0])
    with pytest.raises(InvalidArgumentError):
        eval_benchmark("goldstein_price_inv", [3.0, 0.0])


def test_noisy_oracle_reproducible():
    a, b = noisy_oracle("sinc5", 0.1, seed=3), noisy_oracle("sinc5", 0.1, seed=3)
    xs = [[0.5], [1.0], [2.0]]
    assert [a(x) for x in xs] == [b(x) for x in xs]
    clean = noisy_oracle("sinc5")
    assert clean([1.0]) == eval_benchmark("sinc5", [1.0])
    with pytest.raises(InvalidArgumentError):
        noisy_oracle("sinc5", -1.0)
