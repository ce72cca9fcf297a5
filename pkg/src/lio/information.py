"""Information content of candidate observations under a fitted GP.

All determinant work goes through Schur complements of the training
covariance, so nothing larger than 2x2 is ever factorized per candidate, and
products of determinants are always handled as sums of logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidArgumentError, NumericError
from .gp_core import (
    JITTER_LADDER,
    GPModel,
    build_covariance,
    cross_kernel,
    iter_posterior_cov,
    kernel_eval,
    log_det_cov,
    posterior_cov,
    predict,
)
from .sampling import as_points

VARIANCE_FLOOR = 1e-12
_BLOCK = 512


@dataclass(frozen=True)
class ExtendedCovP:
    """Training covariance bordered by one prospective point."""

    matrix: np.ndarray
    log_det: float


@dataclass(frozen=True)
class ExtendedCovQ:
    """Training covariance bordered by a grid point and a candidate."""

    matrix: np.ndarray
    log_det: float
    det: float


@dataclass(frozen=True)
class InfoReport:
    mean_variance: float
    mean_entropy: float
    aggregate_entropy: float


def gaussian_entropy(cov, d: int | None = None) -> float:
    """Differential entropy (nats) of a d-variate Gaussian with covariance ``cov``."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape[0] != cov.shape[1]:
        raise InvalidArgumentError("covariance must be square")
    d = cov.shape[0] if d is None else d
    if d != cov.shape[0]:
        raise InvalidArgumentError(f"dimension {d} does not match covariance of size {cov.shape[0]}")
    if not np.allclose(cov, cov.T):
        raise InvalidArgumentError("covariance must be symmetric")
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise InvalidArgumentError("covariance is not positive definite") from None
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return 0.5 * d + 0.5 * d * math.log(2 * math.pi) + 0.5 * log_det


def extended_cov_p(model: GPModel, x) -> ExtendedCovP:
    x = np.asarray(x, dtype=float).reshape(1, -1)
    kappa = 1.0 + model.query_noise
    m = len(model.dataset)
    mat = np.empty((m + 1, m + 1))
    if m:
        k = cross_kernel(model, x)[:, 0]
        mat[:m, :m] = build_covariance(model.dataset, model.kernel)
        mat[:m, m] = k
        mat[m, :m] = k
    mat[m, m] = kappa
    _, v = predict(model, x[0], raw=True)
    if v <= 0:
        raise NumericError("extended covariance is singular at the query point", candidate=x[0])
    return ExtendedCovP(mat, log_det_cov(model) + math.log(v))


def _schur_det(v_cand, v_x, c):
    """Determinant of the 2x2 Schur block, with the jitter ladder on failures."""
    det = v_cand * v_x - c * c
    bad = det <= 0
    for jitter in JITTER_LADDER[1:]:
        if not np.any(bad):
            break
        det = np.where(bad, (v_cand + jitter) * (v_x + jitter) - c * c, det)
        bad = det <= 0
    return det, bad


def extended_cov_q(model: GPModel, x, x_cand) -> ExtendedCovQ:
    """Covariance bordered by grid point ``x`` and candidate ``x_cand``.

    The determinant is |C| times the determinant of the 2x2 Schur complement
    (predictive variances on the diagonal, latent posterior covariance off it).
    """
    x = np.asarray(x, dtype=float).ravel()
    x_cand = np.asarray(x_cand, dtype=float).ravel()
    sigma = model.query_noise
    m = len(model.dataset)
    q_xc = kernel_eval(x, x_cand, model.kernel)
    mat = np.empty((m + 2, m + 2))
    if m:
        k = cross_kernel(model, np.vstack([x_cand, x]))
        mat[:m, :m] = build_covariance(model.dataset, model.kernel)
        mat[:m, m:] = k
        mat[m:, :m] = k.T
    mat[m:, m:] = [[1.0 + sigma, q_xc], [q_xc, 1.0 + sigma]]

    pts = np.vstack([x_cand, x])
    _, var = predict(model, pts, raw=True)
    c = posterior_cov(model, x_cand, x)[0, 0]
    det_s = var[0] * var[1] - c * c
    if det_s <= 0:
        return ExtendedCovQ(mat, -math.inf, 0.0)
    log_det = log_det_cov(model) + math.log(det_s)
    return ExtendedCovQ(mat, log_det, math.exp(log_det))


def exact_info_objectives(model: GPModel, candidates, grid=None) -> np.ndarray:
    """Sum over ``grid`` of ln|C_q(x, x_cand)| for every candidate.

    Lower is more informative.  ``grid`` defaults to the candidate set itself.

    Raises
    ------
    NumericError
        If some determinant stays non-positive after jitter.
    """
    cand = as_points(candidates)
    grid = cand if grid is None else as_points(grid)
    _, v_grid = predict(model, grid, raw=True)
    _, v_cand = predict(model, cand, raw=True)
    base = len(grid) * log_det_cov(model)
    out = np.empty(len(cand))
    for start, stop, c in iter_posterior_cov(model, grid, cand, _BLOCK):
        det, bad = _schur_det(v_cand[None, start:stop], v_grid[:, None], c)
        if np.any(bad):
            j = start + int(np.argmax(bad.any(axis=0)))
            raise NumericError(f"|C_q| is not positive for candidate {j} at {cand[j]}", candidate=cand[j])
        out[start:stop] = base + np.log(det).sum(axis=0)
    return out


def exact_info_objective(model: GPModel, x_cand, grid) -> float:
    return float(exact_info_objectives(model, np.atleast_2d(np.asarray(x_cand, dtype=float)), grid)[0])


def select_max_info_exact(model: GPModel, candidates) -> int:
    """Candidate minimizing the summed log-determinant over the candidate set."""
    # np.argmin returns the first minimum, which is the lowest-index tie-break
    return int(np.argmin(exact_info_objectives(model, candidates)))


def select_max_variance(model: GPModel, candidates) -> int:
    _, var = predict(model, as_points(candidates))
    return int(np.argmax(var))


def info_report(model: GPModel, candidates) -> InfoReport:
    """Average variance, per-point entropy and aggregate entropy over the candidates.

    The aggregate entropy is the mean of 0.5 * ln|C_p(x)|; the domain-volume
    factor is dropped.
    """
    _, var = predict(model, as_points(candidates))
    floored = np.maximum(var, VARIANCE_FLOOR)
    mean_entropy = float(np.mean(0.5 * np.log(2 * math.pi * math.e * floored)))
    aggregate = 0.5 * (log_det_cov(model) + float(np.mean(np.log(floored))))
    return InfoReport(float(var.mean()), mean_entropy, aggregate)


def _binary_entropy_after_split(p: float) -> float:
    # entropy left after a threshold query, up to the constant prior entropy
    return p * math.log(p) + (1 - p) * math.log(1 - p)


def bisection_demo(n_outcomes: int) -> tuple[float, float]:
    """Prior entropy (bits) of a uniform choice among ``n_outcomes`` and the best split.

    The split is the fraction ``p`` of outcomes placed below the threshold;
    it is found numerically by minimizing ``p ln p + (1 - p) ln(1 - p)``.
    """
    if int(n_outcomes) != n_outcomes or n_outcomes < 2:
        raise InvalidArgumentError(f"n_outcomes must be an integer >= 2, got {n_outcomes}")
    p = np.full(int(n_outcomes), 1.0 / n_outcomes)
    entropy_bits = float(-(p * np.log2(p)).sum())
    res = minimize_scalar(
        _binary_entropy_after_split, bounds=(1e-12, 1 - 1e-12), method="bounded",
        options={"xatol": 1e-12},
    )
    return entropy_bits, float(res.x)
