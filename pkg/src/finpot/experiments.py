"""Scripted verifications: monotone set families, solvability scans, maximum-principle probes.

Every experiment is a pure function of its configuration.  Subset sampling
in :func:`ugaheri_estimate` uses a seeded generator that is part of the
configuration, so identical configs produce identical reports.  Cells of a
solvability scan are independent and run on a thread pool whose width is
capped by the ``BALAYAGE_THREADS`` environment variable; report assembly is
ordered and single-threaded.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .balayage import CharacterizationViolated, pseudo_balayage
from .core import (
    SOLVER_TOL,
    KernelMatrix,
    Measure,
    NotNested,
    SupportSet,
    energy_distance,
)
from .gauss import capacitary_measure, solve_gauss
from .instances import Instance


class EmptyIntersection(ValueError):
    """A decreasing chain of support sets has empty intersection."""


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-stage record of pseudo-balayage along a monotone chain of sets.

    ``stage_norms`` are energy distances to the final sweep, ``stage_values``
    the attained weighted energies, and ``fund_slack`` the per-pair slack of
    the strong-Cauchy inequality
    ``dist**2 <= 2 * value(smaller class) - 2 * value(larger class)``,
    oriented by inclusion of the feasible classes (so it is nonnegative in
    both directions).
    """

    direction: str
    stage_sizes: tuple
    stage_values: tuple
    stage_norms: tuple
    fund_slack: tuple
    final_distance: float

    def csv_rows(self) -> list[dict]:
        rows = []
        for j in range(len(self.stage_sizes)):
            rows.append(
                {
                    "stage": j,
                    "size": self.stage_sizes[j],
                    "value": self.stage_values[j],
                    "distance_to_final": self.stage_norms[j],
                    "fund_slack": self.fund_slack[j] if j < len(self.fund_slack) else float("nan"),
                }
            )
        return rows

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "stage_sizes": list(self.stage_sizes),
            "stage_values": list(self.stage_values),
            "stage_norms": list(self.stage_norms),
            "fund_slack": list(self.fund_slack),
            "final_distance": self.final_distance,
        }


def _solve_chain(kernel, omega, chain, tol, warm):
    results = []
    prev = None
    for stage in chain:
        res = pseudo_balayage(kernel, omega, stage, tol=tol, w0=prev if warm else None)
        results.append(res)
        prev = res.measure.weights
    return results


def _convergence_report(kernel, omega, chain, results, direction, tol):
    # reference: an independent cold solve on the final set, so the recorded
    # final distance genuinely compares the chained and direct routes
    reference = pseudo_balayage(kernel, omega, chain[-1], tol=tol)
    norms = tuple(energy_distance(kernel, r.measure, reference.measure) for r in results)
    values = tuple(r.value for r in results)
    slack = []
    for j in range(len(results) - 1):
        d2 = energy_distance(kernel, results[j].measure, results[j + 1].measure) ** 2
        if direction == "up":
            s = 2.0 * values[j] - 2.0 * values[j + 1] - d2
        else:
            s = 2.0 * values[j + 1] - 2.0 * values[j] - d2
        slack.append(float(s))
    gate = 10.0 * tol
    worst = min(slack, default=0.0)
    if worst < -gate:
        raise CharacterizationViolated(
            f"strong-Cauchy slack {worst} below -{gate:.1e}", {"fund_slack_min": worst}
        )
    if direction == "up":
        drift = max((values[j + 1] - values[j] for j in range(len(values) - 1)), default=0.0)
    else:
        drift = max((values[j] - values[j + 1] for j in range(len(values) - 1)), default=0.0)
    if drift > gate:
        raise CharacterizationViolated(
            f"stage values violate monotonicity by {drift}", {"value_drift": drift}
        )
    if norms[-1] > gate:
        raise CharacterizationViolated(
            f"final stage distance {norms[-1]} is not zero", {"final_distance": norms[-1]}
        )
    return ConvergenceReport(
        direction=direction,
        stage_sizes=tuple(len(s) for s in chain),
        stage_values=values,
        stage_norms=norms,
        fund_slack=tuple(slack),
        final_distance=float(norms[-1]),
    )


def monotone_up(
    kernel: KernelMatrix,
    omega: Measure,
    chain: Sequence[SupportSet],
    tol: float = SOLVER_TOL,
) -> ConvergenceReport:
    """Sweep along a strictly increasing chain ending at the target set.

    Certifies that the values do not increase, that every adjacent pair
    satisfies the strong-Cauchy inequality, and that the last stage
    reproduces the sweep onto the full target (exactly, on a finite
    universe).
    """
    if not chain:
        raise ValueError("chain must be nonempty")
    for a, b in zip(chain, chain[1:]):
        if not (a.as_set() < b.as_set()):
            raise NotNested("chain must be strictly increasing")
    results = _solve_chain(kernel, omega, chain, tol, warm=True)
    return _convergence_report(kernel, omega, chain, results, "up", tol)


def monotone_down(
    kernel: KernelMatrix,
    omega: Measure,
    chain: Sequence[SupportSet],
    tol: float = SOLVER_TOL,
) -> ConvergenceReport:
    """Sweep along a strictly decreasing chain; the intersection is its last set."""
    if not chain:
        raise ValueError("chain must be nonempty")
    for a, b in zip(chain, chain[1:]):
        if not (b.as_set() < a.as_set()):
            raise NotNested("chain must be strictly decreasing")
    meet = chain[0].as_set()
    for stage in chain[1:]:
        meet = meet & stage.as_set()
    if not meet:
        raise EmptyIntersection("decreasing chain intersects to the empty set")
    results = _solve_chain(kernel, omega, chain, tol, warm=False)
    return _convergence_report(kernel, omega, chain, results, "down", tol)


# ---------------------------------------------------------------------------
# solvability scan over growing truncation families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanCell:
    scaling: float
    truncation: int
    node_count: int
    balayage_mass: float
    gauss_value: float
    equilibrium_constant: float
    outer_mass_fraction: float
    interior_mass_fraction: float

    def to_json(self) -> dict:
        return {
            "scaling": self.scaling,
            "truncation": self.truncation,
            "node_count": self.node_count,
            "balayage_mass": self.balayage_mass,
            "gauss_value": self.gauss_value,
            "equilibrium_constant": self.equilibrium_constant,
            "outer_mass_fraction": self.outer_mass_fraction,
            "interior_mass_fraction": self.interior_mass_fraction,
        }


@dataclass(frozen=True)
class ScanRow:
    scaling: float
    omega_plus_mass: float
    cells: tuple
    verdict: str

    def to_json(self) -> dict:
        return {
            "scaling": self.scaling,
            "omega_plus_mass": self.omega_plus_mass,
            "cells": [c.to_json() for c in self.cells],
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ScanTable:
    """Outcome of a solvability scan over (scaling x truncation) cells.

    A row "stabilizes" when the minimizer keeps at least ``threshold`` of its
    mass off the outermost ``outer_fraction`` of nodes at the final two
    truncations; it "leaks" when at least ``threshold`` of the mass sits on
    that outer rim at both, the signature of mass escaping along the family.
    The threshold is an engineering choice, documented here, not a theorem.
    """

    rows: tuple
    threshold: float
    outer_fraction: float

    def csv_rows(self) -> list[dict]:
        out = []
        for row in self.rows:
            for c in row.cells:
                rec = c.to_json()
                rec["verdict"] = row.verdict
                out.append(rec)
        return out

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "outer_fraction": self.outer_fraction,
            "rows": [r.to_json() for r in self.rows],
        }


STABILIZES = "stabilizes"
LEAKS = "leaks"
INCONCLUSIVE = "inconclusive"


def _thread_count(requested: int | None) -> int:
    env = os.environ.get("BALAYAGE_THREADS")
    if requested is not None:
        return max(1, requested)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _scan_cell(instance: Instance, scaling: float, truncation: int, tol: float, outer_fraction: float) -> ScanCell:
    omega = instance.omega.scaled(scaling)
    bal = pseudo_balayage(instance.kernel, omega, instance.support, tol=tol)
    res = solve_gauss(instance.kernel, omega, instance.support, tol=tol)
    nodes = instance.node_points()
    radii = np.linalg.norm(nodes, axis=1)
    order = np.argsort(radii)
    n_outer = max(1, int(np.ceil(outer_fraction * nodes.shape[0])))
    outer_idx = order[-n_outer:]
    lam = res.measure.weights[: instance.n_nodes]
    outer = float(lam[outer_idx].sum())
    return ScanCell(
        scaling=scaling,
        truncation=truncation,
        node_count=nodes.shape[0],
        balayage_mass=bal.mass,
        gauss_value=res.value,
        equilibrium_constant=res.equilibrium_constant,
        outer_mass_fraction=outer,
        interior_mass_fraction=1.0 - outer,
    )


def solvability_scan(
    family: Sequence[Instance],
    scalings: Sequence[float],
    tol: float = SOLVER_TOL,
    threshold: float = 0.5,
    outer_fraction: float = 0.2,
    threads: int | None = None,
) -> ScanTable:
    """Tabulate swept mass and minimizer localization over a truncation family.

    ``family`` lists the truncation stages (growing node sets standing in for
    one set of infinite capacity), all sharing the charge configuration; each
    ``scaling`` multiplies the charge.  Rows whose swept mass reaches 1 keep
    the minimizer in the interior; rows with deficient swept mass push the
    surplus onto the outermost rim, which moves outward with the family.
    """
    if not family:
        raise ValueError("family must be nonempty")
    jobs = [
        (float(s), t, inst)
        for s in scalings
        for t, inst in enumerate(family)
    ]
    workers = _thread_count(threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        cells = list(
            pool.map(
                lambda job: _scan_cell(job[2], job[0], job[1], tol, outer_fraction), jobs
            )
        )
    rows = []
    per_row = len(family)
    for i, s in enumerate(scalings):
        row_cells = tuple(cells[i * per_row : (i + 1) * per_row])
        last = row_cells[-2:] if len(row_cells) >= 2 else row_cells
        if all(c.interior_mass_fraction >= threshold for c in last):
            verdict = STABILIZES
        elif all(c.outer_mass_fraction >= threshold for c in last):
            verdict = LEAKS
        else:
            verdict = INCONCLUSIVE
        omega_plus = family[-1].omega.scaled(float(s)).positive_part.mass
        rows.append(
            ScanRow(scaling=float(s), omega_plus_mass=omega_plus, cells=row_cells, verdict=verdict)
        )
    return ScanTable(rows=tuple(rows), threshold=threshold, outer_fraction=outer_fraction)


# ---------------------------------------------------------------------------
# empirical maximum-principle constant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UgaheriEstimate:
    """Running lower bound on a maximum-principle constant for one matrix.

    For capacitary measures of sampled subsets (and any supplied measures),
    the ratio ``max_X potential / max_supp potential`` is recorded; its
    maximum is a lower bound on any valid constant.  Exact verification is
    exponential in the node count, so the estimate is explicitly heuristic
    and never certifies the matrix.
    """

    h_hat: float
    witnesses: tuple
    samples: int

    def to_json(self) -> dict:
        return {
            "h_hat": self.h_hat,
            "witnesses": [
                {"subset": list(sub), "ratio": ratio} for sub, ratio in self.witnesses
            ],
            "samples": self.samples,
        }


def ugaheri_estimate(
    kernel: KernelMatrix,
    trials: int,
    seed: int = 0,
    extra_measures: Sequence[Measure] = (),
    tol: float = SOLVER_TOL,
) -> UgaheriEstimate:
    """Probe the matrix for maximum-principle violations at all nodes.

    Samples ``trials`` random subsets with a seeded generator, computes each
    capacitary measure, and compares the potential's global maximum with its
    maximum on the support of the measure.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    m = kernel.size
    best: list[tuple[tuple, float]] = []

    def record(subset, mu: Measure):
        pot = kernel.entries @ mu.weights
        supp = mu.weights > tol * max(1.0, float(np.max(np.abs(mu.weights))))
        if not supp.any():
            return
        c_mu = float(pot[supp].max())
        if c_mu <= 0.0:
            return
        ratio = float(pot.max()) / c_mu
        best.append((tuple(int(i) for i in subset), ratio))

    for _ in range(trials):
        size = int(rng.integers(1, m)) if m > 1 else 1
        subset = np.sort(rng.choice(m, size=size, replace=False))
        res = capacitary_measure(kernel, SupportSet(subset), tol=tol)
        record(subset, res.gamma)
    for mu in extra_measures:
        record(np.flatnonzero(mu.weights > 0.0), mu)
    best.sort(key=lambda t: -t[1])
    h_hat = max(1.0, best[0][1]) if best else 1.0
    return UgaheriEstimate(h_hat=h_hat, witnesses=tuple(best[:3]), samples=trials)


def fund_inequality_slack(kernel, omega, inner: SupportSet, outer: SupportSet, tol=SOLVER_TOL) -> float:
    """Slack of the strong-Cauchy inequality for one nested pair of sets."""
    if not inner.issubset(outer):
        raise NotNested("inner set must be contained in the outer set")
    small = pseudo_balayage(kernel, omega, inner, tol=tol)
    large = pseudo_balayage(kernel, omega, outer, tol=tol)
    d2 = energy_distance(kernel, small.measure, large.measure) ** 2
    return 2.0 * small.value - 2.0 * large.value - d2
