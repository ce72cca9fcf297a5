"""The observe / regress / select loop with a fixed observation budget."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .acquisition import (
    F3_MODES,
    ObjectiveBounds,
    ObjectiveValues,
    ObjectiveWeights,
    bounded_objective_select,
    fit_error_model,
    weighted_sum_select,
)
from .errors import ExhaustedCandidatesError, InvalidArgumentError, OracleError
from .gp_core import DEDUP_TOL, Dataset, Domain, GPModel, KernelConfig, fit, predict
from .information import InfoReport, info_report
from .sampling import CandidateSet, as_points, exclude_observed, grid_sample, monte_carlo_sample

logger = logging.getLogger(__name__)

METHODS = ("weighted", "bounded")


@dataclass(frozen=True)
class GridSampler:
    step: float

    def sample(self, domain: Domain, iteration: int) -> CandidateSet:
        return grid_sample(domain, self.step)


@dataclass(frozen=True)
class MonteCarloSampler:
    """Fresh uniform draws every iteration, seeded with ``seed + iteration``."""

    count: int
    seed: int = 0

    def sample(self, domain: Domain, iteration: int) -> CandidateSet:
        return monte_carlo_sample(domain, self.count, self.seed + iteration)


@dataclass(frozen=True)
class LoopConfig:
    domain: Domain
    sampler: GridSampler | MonteCarloSampler
    kernel_f: KernelConfig = KernelConfig(0.1)
    kernel_e: KernelConfig = KernelConfig(0.1)
    noise_var: float = 0.01
    method: str = "weighted"
    weights: ObjectiveWeights = ObjectiveWeights()
    bounds: ObjectiveBounds = ObjectiveBounds()
    f3_mode: str = "variance"
    budget: int = 10
    center_values: bool = True
    eta: float = 0.0
    dedup_tol: float = DEDUP_TOL

    def __post_init__(self):
        if int(self.budget) != self.budget or self.budget < 1:
            raise InvalidArgumentError(f"budget must be a positive integer, got {self.budget}")
        if not self.noise_var >= 0:
            raise InvalidArgumentError(f"noise_var must be >= 0, got {self.noise_var}")
        if not self.eta >= 0:
            raise InvalidArgumentError(f"eta must be >= 0, got {self.eta}")
        if not self.dedup_tol >= 0:
            raise InvalidArgumentError(f"dedup_tol must be >= 0, got {self.dedup_tol}")
        if self.method not in METHODS:
            raise InvalidArgumentError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.f3_mode not in F3_MODES:
            raise InvalidArgumentError(f"f3_mode must be one of {F3_MODES}, got {self.f3_mode!r}")


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    chosen_point: np.ndarray
    observed_value: float
    fallback_used: bool
    objective_values: ObjectiveValues
    best_est_point: np.ndarray
    best_est_value: float
    info: InfoReport


@dataclass(frozen=True)
class RunTrace:
    """Everything a run produced.

    ``stop_reason`` is ``"budget"``, ``"exhausted"`` or ``"oracle_error"``;
    ``error`` carries the message for the latter two.
    """

    config_echo: LoopConfig
    records: list[IterationRecord]
    final_dataset: Dataset
    stop_reason: str = "budget"
    error: str | None = None
    best_point: np.ndarray | None = None
    best_est_value: float = math.nan
    best_observed_point: np.ndarray | None = None
    best_observed_value: float = math.nan


@dataclass(frozen=True)
class LoopState:
    dataset: Dataset
    config: LoopConfig
    iter: int = 1
    base_candidates: CandidateSet | None = field(default=None, repr=False)


def age_noise(data: Dataset, eta: float, dt: float = 1.0) -> Dataset:
    """Grow every noise variance linearly in time: ``sigma += eta * dt``."""
    if eta < 0 or not dt > 0:
        raise InvalidArgumentError(f"need eta >= 0 and dt > 0, got eta={eta}, dt={dt}")
    if eta == 0:
        return data
    return data.with_noise(data.noise_vars + eta * dt)


def report_best(model: GPModel, candidates) -> tuple[np.ndarray, float]:
    """Maximizer of the posterior mean over the data points, then the candidates."""
    pts = np.vstack([model.dataset.points, as_points(candidates)])
    mean, _ = predict(model, pts)
    i = int(np.argmax(mean))
    return pts[i].copy(), float(mean[i])


def fit_primary(data: Dataset, config: LoopConfig) -> GPModel:
    return fit(data, config.kernel_f, center_values=config.center_values, query_noise=config.noise_var)


def _base_candidates(state: LoopState) -> CandidateSet:
    if state.base_candidates is not None and isinstance(state.config.sampler, GridSampler):
        return state.base_candidates
    return state.config.sampler.sample(state.config.domain, state.iter)


def step(state: LoopState, oracle: Callable[[np.ndarray], float]) -> tuple[LoopState, IterationRecord]:
    """One iteration: sample, fit, score, observe, append, age.

    Raises
    ------
    ExhaustedCandidatesError
        When every candidate has already been observed.
    OracleError
        When the oracle returns a non-finite value.
    """
    cfg = state.config
    base = _base_candidates(state)
    candidates = exclude_observed(base, state.dataset, cfg.dedup_tol)
    model = fit_primary(state.dataset, cfg)
    error_model = fit_error_model(model, cfg.kernel_e) if len(state.dataset) else None
    # measured on the full sample so the sequence is comparable across iterations
    info = info_report(model, base)

    if cfg.method == "weighted":
        i, values = weighted_sum_select(model, error_model, candidates, cfg.weights, cfg.f3_mode)
        fallback = False
    else:
        i, values, fallback = bounded_objective_select(model, error_model, candidates, cfg.bounds, cfg.f3_mode)
    x = candidates.points[i].copy()

    y = _observe(oracle, x)
    data = state.dataset.append(x, y, cfg.noise_var, float(state.iter))
    if cfg.eta > 0:
        data = age_noise(data, cfg.eta)

    best_point, best_value = report_best(fit_primary(data, cfg), base)
    record = IterationRecord(state.iter, x, y, fallback, values, best_point, best_value, info)
    logger.debug("iter %d: x=%s y=%.6g fallback=%s", state.iter, x, y, fallback)
    return replace(state, dataset=data, iter=state.iter + 1, base_candidates=base), record


def _observe(oracle, x) -> float:
    try:
        y = float(oracle(x))
    except OracleError:
        raise
    except (TypeError, ValueError) as exc:
        raise OracleError(f"oracle failed at {x}: {exc}") from exc
    if not math.isfinite(y):
        raise OracleError(f"oracle returned non-finite value {y} at {x}")
    return y


def initial_dataset(config: LoopConfig, oracle) -> Dataset:
    """Observe the lower corner of the domain."""
    x = config.domain.lower.copy()
    return Dataset.empty(config.domain.dim).append(x, _observe(oracle, x), config.noise_var, 0.0)


def run(config: LoopConfig, oracle: Callable[[np.ndarray], float], initial_data: Dataset | None = None) -> RunTrace:
    """Run up to ``config.budget`` iterations.

    ``initial_data=None`` starts from a single observation at the lower
    corner of the domain; pass ``Dataset.empty(d)`` to start with no data.
    Oracle failures and exhausted candidates end the run early; the trace
    keeps every completed iteration and records why it stopped.
    """
    if initial_data is None:
        initial_data = initial_dataset(config, oracle)
    if initial_data.dim != config.domain.dim:
        raise InvalidArgumentError("initial data dimension does not match the domain")
    initial_data.check_distinct(config.dedup_tol)

    state = LoopState(initial_data, config)
    records: list[IterationRecord] = []
    stop_reason, error = "budget", None
    for _ in range(config.budget):
        try:
            state, record = step(state, oracle)
        except ExhaustedCandidatesError as exc:
            stop_reason, error = "exhausted", str(exc)
            break
        except OracleError as exc:
            stop_reason, error = "oracle_error", str(exc)
            break
        records.append(record)

    data = state.dataset
    best_point, best_value = None, math.nan
    if len(data):
        base = state.base_candidates if state.base_candidates is not None else config.sampler.sample(config.domain, 0)
        best_point, best_value = report_best(fit_primary(data, config), base)
        j = int(np.argmax(data.values))
        best_obs_point, best_obs_value = data.points[j].copy(), float(data.values[j])
    else:
        best_obs_point, best_obs_value = None, math.nan
    return RunTrace(
        config, records, data, stop_reason, error,
        best_point, best_value, best_obs_point, best_obs_value,
    )
