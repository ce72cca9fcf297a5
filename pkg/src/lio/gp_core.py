"""Gaussian-process regression with a squared-exponential kernel.

The prior has unit amplitude and zero mean; observation noise is additive,
Gaussian and may differ per point.  Everything is exact (dense Cholesky),
which is the right trade-off for the few dozen points this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.spatial.distance import cdist

from .errors import IllConditionedDataError, InvalidArgumentError

DEDUP_TOL = 1e-9
JITTER_LADDER = (0.0, 1e-10, 1e-8, 1e-6)
# Kernel values below exp(-300) are stored as exact zeros: left in, they
# breed subnormals in later products, which are very slow on x86.
_MIN_EXPONENT = -300.0
_VARIANCE_ROUNDOFF = 1e-10


@dataclass(frozen=True, eq=False)
class Domain:
    """Axis-aligned box ``[lower, upper]`` in d dimensions."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise InvalidArgumentError("domain bounds must be equal-length non-empty vectors")
        if not np.all(lo < hi):
            raise InvalidArgumentError(f"domain requires lower < upper, got {lo} and {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def __eq__(self, other):
        if not isinstance(other, Domain):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((tuple(self.lower), tuple(self.upper)))

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        span = self.upper - self.lower
        return bool(np.all(x >= self.lower - tol * span) and np.all(x <= self.upper + tol * span))


@dataclass(frozen=True)
class KernelConfig:
    """Squared-exponential kernel ``exp(-|x - x'|^2 / (2 * length_scale_sq))``."""

    length_scale_sq: float = 1.0

    def __post_init__(self):
        if not self.length_scale_sq > 0:
            raise InvalidArgumentError(f"length_scale_sq must be > 0, got {self.length_scale_sq}")


@dataclass(frozen=True)
class Dataset:
    """Observed points with their values, noise variances and timestamps.

    Arrays are stored as float copies; ``points`` always has shape (M, d).
    """

    points: np.ndarray
    values: np.ndarray
    noise_vars: np.ndarray
    timestamps: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise InvalidArgumentError("points must be an (M, d) array")
        m = pts.shape[0]
        arrays = {}
        for name in ("values", "noise_vars", "timestamps"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float)).ravel()
            if arr.size != m:
                raise InvalidArgumentError(f"{name} has length {arr.size}, expected {m}")
            arrays[name] = arr
        if np.any(arrays["noise_vars"] < 0):
            raise InvalidArgumentError("noise_vars must be nonnegative")
        object.__setattr__(self, "points", pts)
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    @classmethod
    def empty(cls, dim: int) -> "Dataset":
        return cls(np.empty((0, dim)), [], [], [])

    @classmethod
    def from_points(cls, points, values, noise_var: float = 0.0, timestamp: float = 0.0) -> "Dataset":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        m = pts.shape[0]
        return cls(pts, values, np.full(m, float(noise_var)), np.full(m, float(timestamp)))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def append(self, x, y: float, noise_var: float, timestamp: float) -> "Dataset":
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return Dataset(
            np.vstack([self.points, x]),
            np.append(self.values, y),
            np.append(self.noise_vars, noise_var),
            np.append(self.timestamps, timestamp),
        )

    def with_noise(self, noise_vars) -> "Dataset":
        return replace(self, noise_vars=np.asarray(noise_vars, dtype=float))

    def closest_pair(self):
        """Indices and distance of the two closest points, or None if M < 2."""
        if len(self) < 2:
            return None
        d2 = sq_distances(self.points, self.points)
        np.fill_diagonal(d2, np.inf)
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        i, j = sorted((int(i), int(j)))
        return i, j, float(np.sqrt(d2[i, j]))

    def check_distinct(self, tol: float = DEDUP_TOL) -> None:
        pair = self.closest_pair()
        if pair is not None and pair[2] <= tol:
            raise InvalidArgumentError(
                f"points {pair[0]} and {pair[1]} are within {tol:g} of each other"
            )


@dataclass(frozen=True)
class GPModel:
    """A fitted posterior.  Immutable; safe to share between threads."""

    dataset: Dataset
    kernel: KernelConfig
    chol: np.ndarray
    alpha: np.ndarray
    y_offset: float
    query_noise: float
    jitter: float = 0.0
    _log_det: float = field(default=0.0, repr=False)

    @property
    def dim(self) -> int:
        return self.dataset.dim


def sq_distances(a, b) -> np.ndarray:
    """Pairwise squared Euclidean distances between the rows of a and b."""
    return cdist(np.asarray(a, dtype=float), np.asarray(b, dtype=float), "sqeuclidean")


def kernel_eval(x, x2, kernel: KernelConfig) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x.shape != x2.shape:
        raise InvalidArgumentError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    r2 = float(np.sum((x - x2) ** 2))
    return float(np.exp(-r2 / (2.0 * kernel.length_scale_sq)))


def _safe_exp(z: np.ndarray) -> np.ndarray:
    tiny = z < _MIN_EXPONENT
    np.maximum(z, _MIN_EXPONENT, out=z)
    np.exp(z, out=z)
    z[tiny] = 0.0
    return z


def kernel_matrix(a, b, kernel: KernelConfig) -> np.ndarray:
    """Kernel values between every row of ``a`` and every row of ``b``."""
    z = sq_distances(a, b)
    z *= -0.5 / kernel.length_scale_sq
    return _safe_exp(z)


def build_covariance(data: Dataset, kernel: KernelConfig) -> np.ndarray:
    cov = kernel_matrix(data.points, data.points, kernel)
    cov[np.diag_indices_from(cov)] += data.noise_vars
    return cov


def fit(
    data: Dataset,
    kernel: KernelConfig,
    center_values: bool = True,
    query_noise: float | None = None,
) -> GPModel:
    """Factorize the data covariance and precompute the mean weights.

    Parameters
    ----------
    data : Dataset
        Training set; may be empty, in which case the model is the prior.
    kernel : KernelConfig
    center_values : bool
        Subtract the mean of the observed values before solving and add it
        back in predictions.
    query_noise : float, optional
        Noise variance added to the predictive variance at new points.
        Defaults to the largest noise variance in ``data`` (0 when empty).

    Raises
    ------
    IllConditionedDataError
        If two noiseless points coincide or the covariance stays indefinite
        after the jitter ladder.
    """
    m = len(data)
    if query_noise is None:
        query_noise = float(data.noise_vars.max()) if m else 0.0
    if query_noise < 0:
        raise InvalidArgumentError("query_noise must be nonnegative")
    if m == 0:
        return GPModel(data, kernel, np.empty((0, 0)), np.empty(0), 0.0, float(query_noise))

    pair = data.closest_pair()
    if pair is not None and pair[2] <= DEDUP_TOL:
        i, j, _ = pair
        if data.noise_vars[i] == 0 and data.noise_vars[j] == 0:
            raise IllConditionedDataError(
                f"noiseless points {i} and {j} coincide; covariance is singular", pair=(i, j)
            )

    cov = build_covariance(data, kernel)
    eye = np.eye(m)
    for jitter in JITTER_LADDER:
        try:
            chol = np.linalg.cholesky(cov + jitter * eye)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.diag(chol) > 0):
            break
    else:
        ij = pair[:2] if pair is not None else None
        raise IllConditionedDataError(
            f"covariance is not positive definite (closest points: {ij})", pair=ij
        )

    y_offset = float(data.values.mean()) if center_values else 0.0
    alpha = cho_solve((chol, True), data.values - y_offset)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return GPModel(data, kernel, chol, alpha, y_offset, float(query_noise), jitter, log_det)


def _queries(model: GPModel, query) -> tuple[np.ndarray, bool]:
    q = np.asarray(query, dtype=float)
    single = q.ndim <= 1
    q = q.reshape(1, -1) if single else q
    if model.dim and q.shape[1] != model.dim:
        raise InvalidArgumentError(f"query has dimension {q.shape[1]}, model has {model.dim}")
    return q, single


def cross_kernel(model: GPModel, query) -> np.ndarray:
    """Kernel between training points (rows) and query points (columns)."""
    return kernel_matrix(model.dataset.points, query, model.kernel)


def predict(model: GPModel, query, raw: bool = False):
    """Posterior mean and predictive variance at one or many query points.

    ``query`` may be a single d-vector (scalars are returned) or an (n, d)
    array.  The predictive variance includes ``model.query_noise``.  With
    ``raw=True`` the variance is returned before clamping at zero.
    """
    q, single = _queries(model, query)
    if len(model.dataset) == 0:
        mean = np.full(q.shape[0], model.y_offset)
        var = np.full(q.shape[0], 1.0 + model.query_noise)
    else:
        k = cross_kernel(model, q)
        mean = k.T @ model.alpha + model.y_offset
        v = solve_triangular(model.chol, k, lower=True, check_finite=False)
        var = 1.0 + model.query_noise - np.einsum("ij,ij->j", v, v)
        if not raw:
            var = np.where((var < 0) & (var >= -_VARIANCE_ROUNDOFF), 0.0, var)
            var = np.maximum(var, 0.0)
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def posterior_cov(model: GPModel, a, b) -> np.ndarray:
    """Latent (noise-free) posterior covariance between rows of a and b."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    prior = kernel_matrix(a, b, model.kernel)
    if len(model.dataset) == 0:
        return prior
    va = solve_triangular(model.chol, cross_kernel(model, a), lower=True, check_finite=False)
    vb = solve_triangular(model.chol, cross_kernel(model, b), lower=True, check_finite=False)
    return prior - va.T @ vb


def iter_posterior_cov(model: GPModel, a, b, block: int = 512):
    """Yield ``(start, stop, cov)`` with the latent posterior covariance
    between all rows of ``a`` and rows ``start:stop`` of ``b``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    same = b is a
    b = a if same else np.atleast_2d(np.asarray(b, dtype=float))
    empty = len(model.dataset) == 0
    if not empty:
        va = solve_triangular(model.chol, cross_kernel(model, a), lower=True, check_finite=False)
        vb = va if same else solve_triangular(
            model.chol, cross_kernel(model, b), lower=True, check_finite=False
        )
    scale = -0.5 / model.kernel.length_scale_sq
    vat = None if empty else np.ascontiguousarray(va.T)
    for start in range(0, b.shape[0], block):
        stop = min(start + block, b.shape[0])
        cov = sq_distances(a, b[start:stop])
        cov *= scale
        _safe_exp(cov)
        if not empty:
            cov -= vat @ vb[:, start:stop]
        yield start, stop, cov


def log_det_cov(model: GPModel) -> float:
    """ln|C| of the (jittered) training covariance; 0 for an empty model."""
    return model._log_det
