import math

import numpy as np
import pytest


def naive_gram(a):
    m, n = a.shape
    g = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            g[i, j] = sum(a[r, i] * a[r, j] for r in range(m))
    return g


def eig2x2(a, b, c):
    """Closed-form eigenvalues of [[a, b], [b, c]], ascending."""
    mid = 0.5 * (a + c)
    rad = math.hypot(0.5 * (a - c), b)
    return mid - rad, mid + rad


def unit_columns(rng, m, n):
    a = rng.standard_normal((m, n))
    return a / np.linalg.norm(a, axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def thm2_k2():
    r = math.sqrt(0.5)
    return np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5], [0.0, 0.0, r]])
