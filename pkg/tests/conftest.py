import numpy as np
import pytest

from finpot.core import KernelMatrix
from finpot.fixtures import mixed_instance, random_spd_kernel


@pytest.fixture
def small_kernel() -> KernelMatrix:
    return random_spd_kernel(0, 6)


@pytest.fixture
def mixed_problem():
    """Kernel, mixed-sign charge, and target set with a nonzero sweep."""
    return mixed_instance(3, 12)


def double_loop_potential(entries: np.ndarray, weights: np.ndarray) -> np.ndarray:
    m = entries.shape[0]
    out = np.zeros(m)
    for i in range(m):
        for j in range(m):
            out[i] += entries[i, j] * weights[j]
    return out


def double_loop_energy(entries: np.ndarray, mu: np.ndarray, nu: np.ndarray) -> float:
    total = 0.0
    for i in range(entries.shape[0]):
        for j in range(entries.shape[0]):
            total += mu[i] * entries[i, j] * nu[j]
    return total
