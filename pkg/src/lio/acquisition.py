"""Objectives for choosing the next observation and the two selection rules.

For a candidate ``x``:

* ``f1`` is the posterior mean, to be maximized;
* ``f2`` is the model error left over the candidate set if ``x`` were
  observed, to be minimized;
* ``f3`` is the information gained by observing ``x``: the predictive
  variance (cheap) or the negated summed log-determinant (exact).

The error field comes from a second GP fitted to the absolute residuals of
the first.  Observing ``x`` is modelled by adding a zero-residual fantasy
point there, which is a rank-one update of that second GP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .gp_core import Dataset, GPModel, KernelConfig, fit, iter_posterior_cov, predict
from .information import exact_info_objectives
from .sampling import as_points

ERROR_NOISE = 1e-8
DEGENERATE_SPAN = 1e-12
F3_MODES = ("variance", "exact")
_BLOCK = 256


@dataclass(frozen=True)
class ObjectiveWeights:
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0

    def __post_init__(self):
        w = self.as_array()
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidArgumentError(f"weights must be finite and nonnegative, got {w.tolist()}")
        if w.sum() <= 0:
            raise InvalidArgumentError("at least one weight must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3], dtype=float)

    def normalized(self) -> np.ndarray:
        w = self.as_array()
        return w / w.sum()


@dataclass(frozen=True)
class ObjectiveBounds:
    """Caps on the error objective (``b1``) and on the variance (``b2``)."""

    b1: float = 0.5
    b2: float = 0.2

    def __post_init__(self):
        if not (self.b1 > 0 and self.b2 > 0):
            raise InvalidArgumentError(f"bounds must be positive, got b1={self.b1}, b2={self.b2}")


@dataclass(frozen=True)
class NormalizationBounds:
    f1_lo: float
    f1_hi: float
    f2_lo: float
    f2_hi: float
    f3_lo: float
    f3_hi: float

    def spans(self) -> np.ndarray:
        """Interval widths, with near-zero widths replaced by 1."""
        d = np.array([self.f1_hi - self.f1_lo, self.f2_hi - self.f2_lo, self.f3_hi - self.f3_lo])
        return np.where(d < DEGENERATE_SPAN, 1.0, d)


@dataclass(frozen=True)
class ObjectiveValues:
    f1: float
    f2: float
    f3: float
    f1n: float
    f2n: float
    f3n: float


def _check_mode(mode: str) -> None:
    if mode not in F3_MODES:
        raise InvalidArgumentError(f"f3 mode must be one of {F3_MODES}, got {mode!r}")


def f1_value(model: GPModel, x_cand) -> float:
    return predict(model, x_cand)[0]


def fit_error_model(model: GPModel, kernel_e: KernelConfig) -> GPModel:
    """GP through the absolute residuals of ``model`` at its own data points."""
    data = model.dataset
    if len(data) == 0:
        raise InvalidArgumentError("the error model needs at least one observation")
    mean, _ = predict(model, data.points)
    residuals = np.abs(data.values - mean)
    err_data = Dataset(data.points, residuals, np.full(len(data), ERROR_NOISE), data.timestamps)
    return fit(err_data, kernel_e, center_values=False, query_noise=0.0)


def f2_values(error_model: GPModel | None, candidates, grid=None) -> np.ndarray:
    """Mean absolute error over ``grid`` after a fantasy zero at each candidate.

    ``grid`` defaults to the candidates.  Without an error model (no data
    yet) the error objective is identically zero.
    """
    cand = as_points(candidates)
    grid = cand if grid is None else as_points(grid)
    if error_model is None:
        return np.zeros(len(cand))
    e_grid, _ = predict(error_model, grid)
    e_cand, v_cand = predict(error_model, cand, raw=True)
    # predictive variance of the latent error plus the fantasy point's noise
    gain = e_cand / (np.maximum(v_cand, 0.0) + ERROR_NOISE)
    out = np.empty(len(cand))
    for start, stop, c in iter_posterior_cov(error_model, grid, cand, _BLOCK):
        c *= -gain[None, start:stop]
        c += e_grid[:, None]
        np.abs(c, out=c)
        out[start:stop] = c.sum(axis=0)
    return out / len(grid)


def f2_value(model: GPModel, error_model: GPModel | None, x_cand, candidates) -> float:
    x = np.atleast_2d(np.asarray(x_cand, dtype=float))
    return float(f2_values(error_model, x, as_points(candidates))[0])


def f3_values(model: GPModel, candidates, mode: str = "variance") -> np.ndarray:
    _check_mode(mode)
    cand = as_points(candidates)
    if mode == "variance":
        return predict(model, cand)[1]
    return -exact_info_objectives(model, cand)


def f3_value(model: GPModel, x_cand, candidates, mode: str = "variance") -> float:
    _check_mode(mode)
    if mode == "variance":
        return predict(model, x_cand)[1]
    x = np.atleast_2d(np.asarray(x_cand, dtype=float))
    return -float(exact_info_objectives(model, x, as_points(candidates))[0])


def _bounds_from(f1, e_abs, f3, kappa_max, mode) -> NormalizationBounds:
    f2_hi = float(e_abs.max()) if e_abs is not None else 0.0
    if mode == "variance":
        f3_lo, f3_hi = 0.0, kappa_max
    else:
        # the exact objective is a log-determinant sum with no natural zero
        f3_lo, f3_hi = float(f3.min()), float(f3.max())
    return NormalizationBounds(float(f1.min()), float(f1.max()), 0.0, f2_hi, f3_lo, f3_hi)


def normalization_bounds(model: GPModel, error_model: GPModel | None, candidates, mode: str = "variance"):
    cand = as_points(candidates)
    f1 = predict(model, cand)[0]
    e_abs = np.abs(predict(error_model, cand)[0]) if error_model is not None else None
    f3 = f3_values(model, cand, mode) if mode == "exact" else None
    return _bounds_from(f1, e_abs, f3, 1.0 + model.query_noise, mode)


@dataclass(frozen=True)
class _Scores:
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    variance: np.ndarray
    bounds: NormalizationBounds

    def values_at(self, i: int) -> ObjectiveValues:
        b = self.bounds
        d1, d2, d3 = b.spans()
        return ObjectiveValues(
            float(self.f1[i]), float(self.f2[i]), float(self.f3[i]),
            float((self.f1[i] - b.f1_lo) / d1),
            float((self.f2[i] - b.f2_lo) / d2),
            float((self.f3[i] - b.f3_lo) / d3),
        )


def objective_table(model: GPModel, error_model: GPModel | None, candidates, mode: str = "variance") -> _Scores:
    """Raw objectives for every candidate plus the normalization bounds."""
    _check_mode(mode)
    cand = as_points(candidates)
    if len(cand) == 0:
        raise InvalidArgumentError("candidate set is empty")
    f1, var = predict(model, cand)
    f2 = f2_values(error_model, cand)
    f3 = var if mode == "variance" else -exact_info_objectives(model, cand)
    e_abs = np.abs(predict(error_model, cand)[0]) if error_model is not None else None
    bounds = _bounds_from(f1, e_abs, f3, 1.0 + model.query_noise, mode)
    return _Scores(f1, f2, f3, var, bounds)


def weighted_sum_select(model, error_model, candidates, weights: ObjectiveWeights, mode: str = "variance"):
    """Index maximizing the normalized weighted sum, and its objective values.

    Ties resolve to the lowest index.
    """
    s = objective_table(model, error_model, candidates, mode)
    w1, w2, w3 = weights.normalized()
    d1, d2, d3 = s.bounds.spans()
    score = (w1 / d1) * (s.f1 - s.bounds.f1_lo) - (w2 / d2) * s.f2 + (w3 / d3) * (s.f3 - s.bounds.f3_lo)
    i = int(np.argmax(score))
    return i, s.values_at(i)


def bounded_objective_select(model, error_model, candidates, bounds: ObjectiveBounds, mode: str = "variance"):
    """Maximize the posterior mean subject to caps on error and variance.

    The variance cap always applies to the predictive variance, whatever
    ``mode``; ``mode`` only selects what is reported as ``f3``.  When no
    candidate is feasible the highest-variance candidate is returned with
    ``fallback_used=True``.
    """
    s = objective_table(model, error_model, candidates, mode)
    feasible = (s.f2 <= bounds.b1) & (s.variance <= bounds.b2)
    if np.any(feasible):
        i = int(np.argmax(np.where(feasible, s.f1, -np.inf)))
        return i, s.values_at(i), False
    i = int(np.argmax(s.variance))
    return i, s.values_at(i), True
