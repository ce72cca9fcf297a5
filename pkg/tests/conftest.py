import itertools

import numpy as np
import pytest

from lio import Dataset, KernelConfig, fit


def cofactor_det(a):
    """Determinant by Laplace expansion along the first row; independent of LAPACK."""
    a = [list(map(float, row)) for row in a]
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        total += (-1) ** j * a[0][j] * cofactor_det(minor)
    return total


def permutation_det(a):
    """Leibniz formula; only usable for tiny matrices."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1.0
        for i, p in enumerate(perm):
            prod *= a[i, p]
        total += (-1) ** inversions * prod
    return total


def random_model(rng, dim=None, m=None, noise=None, ell2=None, center=True):
    """A fitted GP on well-separated random points."""
    dim = dim or int(rng.integers(1, 3))
    m = int(rng.integers(1, 9)) if m is None else m
    noise = float(rng.uniform(0.001, 0.2)) if noise is None else noise
    ell2 = float(rng.uniform(0.05, 0.5)) if ell2 is None else ell2
    pts = []
    while len(pts) < m:
        p = rng.uniform(-1, 1, dim)
        if all(np.linalg.norm(p - q) > 0.15 for q in pts):
            pts.append(p)
    pts = np.array(pts).reshape(m, dim)
    y = rng.normal(size=m)
    data = Dataset.from_points(pts, y, noise)
    return fit(data, KernelConfig(ell2), center_values=center)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
