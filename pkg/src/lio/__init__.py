"""Gaussian-process search for the maximum of an expensive black-box function."""

from .acquisition import (
    ObjectiveBounds,
    ObjectiveValues,
    ObjectiveWeights,
    bounded_objective_select,
    f2_values,
    f3_values,
    fit_error_model,
    weighted_sum_select,
)
from .benchmarks import REGISTRY, eval_benchmark, get_benchmark, noisy_oracle, true_optima
from .errors import (
    ExhaustedCandidatesError,
    IllConditionedDataError,
    InvalidArgumentError,
    LioError,
    NumericError,
    OracleError,
    ResourceLimitError,
)
from .gp_core import Dataset, Domain, GPModel, KernelConfig, fit, predict
from .information import (
    InfoReport,
    bisection_demo,
    exact_info_objectives,
    extended_cov_p,
    extended_cov_q,
    info_report,
    select_max_info_exact,
    select_max_variance,
)
from .sampling import CandidateSet, exclude_observed, grid_sample, min_sample_count, monte_carlo_sample
from .search_loop import GridSampler, LoopConfig, MonteCarloSampler, RunTrace, report_best, run

__version__ = "0.1.0"
