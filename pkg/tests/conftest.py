import math

import numpy as np
import pytest


def digits(value, n):
    return [(value >> p) & 1 for p in range(n)]


def from_digits(ds):
    return sum(d << p for p, d in enumerate(ds))


def rotate_digits(value, n):
    """Reference rotation on an explicit digit list: d_{n-1} d_0 ... d_{n-2}."""
    ds = digits(value, n)
    return from_digits([ds[-1]] + ds[:-1])


def defects_by_digits(value, n):
    half = math.ceil(n / 2)
    ds = digits(value, n)
    return sum(1 for p in range(half) if ds[p] == 0) + sum(1 for p in range(half, n) if ds[p] == 1)


def cocked_count_by_enumeration(n, budget):
    """Cocked members on the canonical orbit, walking explicit digit lists."""
    start = (1 << math.ceil(n / 2)) - 1
    count, v = 0, start
    for _ in range(n):
        count += defects_by_digits(v, n) <= budget
        v = rotate_digits(v, n)
    assert v == start
    return count


def spectral_power_oracle(n, t):
    """``P**t`` for the forward cycle from numpy's eigendecomposition, log branch in [0, 2pi)."""
    P = np.roll(np.eye(n), 1, axis=0)
    w, V = np.linalg.eig(P)
    angles = np.mod(np.angle(w), 2 * np.pi)
    # eigenvalue 1 can come back with angle just below 2pi
    angles[np.isclose(angles, 2 * np.pi)] = 0.0
    return V @ np.diag(np.exp(1j * angles * t)) @ np.linalg.inv(V)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
