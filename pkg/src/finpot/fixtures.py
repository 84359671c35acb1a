"""Seeded deterministic instance generators shared by the test and verify suites.

All randomness flows through ``numpy.random.default_rng(seed)``; a fixture is
a pure function of its seed and size arguments.
"""

from __future__ import annotations

import numpy as np

from .core import KernelMatrix, Measure, SupportSet


def random_spd_kernel(seed: int, m: int, diag_boost: float = 0.5) -> KernelMatrix:
    """Random symmetric matrix with nonnegative entries and a PD diagonal lift."""
    rng = np.random.default_rng(seed)
    basis = rng.random((m, m + 3))
    gram = basis @ basis.T
    gram = (gram + gram.T) / 2.0
    gram[np.diag_indices(m)] += diag_boost * (1.0 + rng.random(m))
    return KernelMatrix(gram)


def random_signed_measure(
    seed: int, m: int, pos_scale: float = 1.0, neg_scale: float = 1.0, density: float = 0.6
) -> Measure:
    """Sparse-ish signed weight vector with both parts present (for m >= 2)."""
    rng = np.random.default_rng(seed)
    w = np.zeros(m)
    active = rng.random(m) < density
    if not active.any():
        active[rng.integers(m)] = True
    signs = np.where(rng.random(m) < 0.5, 1.0, -1.0)
    mags = rng.random(m)
    w[active] = (signs * mags)[active]
    w[w > 0] *= pos_scale
    w[w < 0] *= neg_scale
    if m >= 2:
        # guarantee a genuinely mixed sign pattern
        if not (w > 0).any():
            w[int(np.argmin(w))] = abs(w[int(np.argmin(w))]) * pos_scale
        if not (w < 0).any():
            j = int(np.argmin(np.abs(w - w.max())))
            w[(j + 1) % m] = -0.3 * neg_scale
    return Measure(w)


def random_support(seed: int, m: int, k: int | None = None) -> SupportSet:
    rng = np.random.default_rng(seed)
    if k is None:
        k = int(rng.integers(1, m + 1))
    idx = np.sort(rng.choice(m, size=k, replace=False))
    return SupportSet(idx)


def mixed_instance(seed: int, m: int) -> tuple[KernelMatrix, Measure, SupportSet]:
    """Random PD kernel, mixed-sign charge, and a target covering ~70% of nodes."""
    kernel = random_spd_kernel(seed, m)
    omega = random_signed_measure(seed + 1, m, pos_scale=1.5, neg_scale=0.8)
    k = max(1, int(round(0.7 * m)))
    support = random_support(seed + 2, m, k)
    return kernel, omega, support


def nested_chain(seed: int, m: int, stages: int) -> list[SupportSet]:
    """Strictly increasing chain of supports ending at the full node range."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(m)
    sizes = np.unique(np.linspace(max(1, m // stages), m, stages).astype(int))
    return [SupportSet(np.sort(order[:s])) for s in sizes]
