"""Candidate sets over the search box and the random-sampling sample bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExhaustedCandidatesError, InvalidArgumentError, ResourceLimitError
from .gp_core import DEDUP_TOL, Dataset, Domain, sq_distances

GRID_CAP = 1_000_000


@dataclass(frozen=True)
class CandidateSet:
    """A finite sample of the domain.

    ``descriptor`` is the grid step for ``origin == "grid"`` and the draw
    count for ``origin == "monte_carlo"``.
    """

    points: np.ndarray
    origin: str
    descriptor: float
    seed: int | None = None

    def __len__(self) -> int:
        return self.points.shape[0]


def as_points(candidates) -> np.ndarray:
    """Return the (T, d) point array behind a CandidateSet or array-like."""
    if isinstance(candidates, CandidateSet):
        return candidates.points
    pts = np.asarray(candidates, dtype=float)
    return pts.reshape(-1, 1) if pts.ndim == 1 else pts


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    span = hi - lo
    n = round(span / step)
    if n >= 1 and abs(n * step - span) <= 1e-9 * max(1.0, abs(span)):
        return np.linspace(lo, hi, n + 1)
    ticks = lo + step * np.arange(int(math.floor(span / step)) + 1)
    if hi - ticks[-1] > 1e-9 * max(1.0, abs(span)):
        ticks = np.append(ticks, hi)
    return ticks


def grid_sample(domain: Domain, step: float, cap: int = GRID_CAP) -> CandidateSet:
    """Regular grid with spacing ``step``, both bounds included.

    Points are ordered row-major (last axis varies fastest).  When the box
    width is not a multiple of ``step`` the last tick is clamped to the upper
    bound.
    """
    if not step > 0:
        raise InvalidArgumentError(f"grid step must be > 0, got {step}")
    if np.any(step > domain.upper - domain.lower + 1e-12):
        raise InvalidArgumentError("grid step exceeds the domain width")
    axes = [_axis(lo, hi, step) for lo, hi in zip(domain.lower, domain.upper)]
    size = math.prod(len(a) for a in axes)
    if size > cap:
        raise ResourceLimitError(f"grid would have {size} points (cap {cap})")
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    return CandidateSet(points, "grid", float(step))


def monte_carlo_sample(domain: Domain, count: int, seed: int) -> CandidateSet:
    """``count`` i.i.d. uniform draws from the box, reproducible per seed."""
    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    u = rng.random((int(count), domain.dim))
    points = domain.lower + u * (domain.upper - domain.lower)
    return CandidateSet(points, "monte_carlo", int(count), int(seed))


def min_sample_count(eps: float, delta: float) -> int:
    """Smallest N with ``(1 - eps)**N <= delta``.

    With that many i.i.d. samples the best sampled value is, with confidence
    at least ``1 - delta``, exceeded on a set of probability at most ``eps``,
    whatever the sampling distribution.
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise InvalidArgumentError(f"eps and delta must lie in (0, 1), got {eps}, {delta}")
    n = max(1, math.ceil(math.log(1.0 / delta) / math.log(1.0 / (1.0 - eps))))
    # guard the ceil against round-off in either direction
    while n > 1 and (1.0 - eps) ** (n - 1) <= delta:
        n -= 1
    while (1.0 - eps) ** n > delta:
        n += 1
    return n


def exclude_observed(candidates: CandidateSet, data: Dataset, tol: float = DEDUP_TOL) -> CandidateSet:
    """Drop every candidate within ``tol`` of an observed point, keeping order."""
    if tol < 0:
        raise InvalidArgumentError("tol must be nonnegative")
    pts = candidates.points
    if len(data):
        keep = np.ones(len(pts), dtype=bool)
        for start in range(0, len(pts), 4096):
            block = pts[start:start + 4096]
            near = sq_distances(block, data.points) <= tol * tol
            keep[start:start + 4096] = ~near.any(axis=1)
        pts = pts[keep]
    if len(pts) == 0:
        raise ExhaustedCandidatesError("no candidate points remain after excluding observed ones")
    return CandidateSet(pts, candidates.origin, candidates.descriptor, candidates.seed)
