"""Strictly convex quadratic minimization over the nonnegative cone and the simplex.

Two problems are solved here, both with a symmetric strictly positive
definite ``Q``:

* cone:    minimize ``w @ Q @ w - 2 b @ w``  over  ``w >= 0``
* simplex: minimize ``w @ Q @ w + 2 f @ w``  over  ``w >= 0, sum(w) = 1``

The solver strategy is a projected gradient phase with adaptive
Barzilai-Borwein steps and monotone safeguarding, followed by an active-set
polish that solves the reduced linear system on the detected support.  The
polish drives complementarity to machine precision, which the downstream
certification relies on.  Exhaustive small-instance oracles
(:func:`brute_force_cone`, :func:`brute_force_simplex`) enumerate supports
and serve as the independent ground truth in the test suite.

Solvers are pure and deterministic given ``(problem, tol, max_iter, w0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SOLVER_TOL


class MaxIterExceeded(RuntimeError):
    """Solver ran out of iterations; carries the best iterate and its report."""

    def __init__(self, message: str, best_w: np.ndarray, report: "KktReport"):
        super().__init__(message)
        self.best_w = best_w
        self.report = report


class TooLarge(ValueError):
    """Instance too large for exhaustive enumeration."""


def _as_sym_matrix(Q) -> np.ndarray:
    arr = np.array(Q, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError("Q must be a nonempty square matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Q must be finite")
    if not np.allclose(arr, arr.T, rtol=0.0, atol=0.0):
        raise ValueError("Q must be symmetric")
    arr.setflags(write=False)
    return arr


def _as_vector(v, k: int, name: str) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.shape != (k,):
        raise ValueError(f"{name} must be a vector of length {k}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ConeQpProblem:
    """Data of the nonnegative-cone problem ``min w@Q@w - 2 b@w, w >= 0``."""

    Q: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        Q = _as_sym_matrix(self.Q)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", _as_vector(self.b, Q.shape[0], "b"))

    @property
    def size(self) -> int:
        return int(self.b.size)

    def objective(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=float)
        return float(w @ (self.Q @ w) - 2.0 * (self.b @ w))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return 2.0 * (self.Q @ w - self.b)

    def to_json(self) -> dict:
        return {"kind": "cone", "k": self.size, "Q": self.Q.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True)
class SimplexQpProblem:
    """Data of the simplex problem ``min w@Q@w + 2 f@w, w >= 0, sum(w) = 1``."""

    Q: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        Q = _as_sym_matrix(self.Q)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "f", _as_vector(self.f, Q.shape[0], "f"))

    @property
    def size(self) -> int:
        return int(self.f.size)

    def objective(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=float)
        return float(w @ (self.Q @ w) + 2.0 * (self.f @ w))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return 2.0 * (self.Q @ w + self.f)

    def to_json(self) -> dict:
        return {"kind": "simplex", "k": self.size, "Q": self.Q.tolist(), "f": self.f.tolist()}


@dataclass(frozen=True)
class KktReport:
    """Numerical optimality certificate attached to every solve.

    All residuals are nonnegative maxima of violation magnitudes.  For the
    simplex problem ``multiplier`` is the Lagrange constant c of the mass
    constraint in the convention ``(Q w + f)_i >= c`` with equality on the
    support; for the cone problem it is ``None``.  ``objective_trace`` lists
    the objective after every accepted step (nonincreasing by construction).
    """

    stationarity_residual: float
    complementarity_residual: float
    feasibility_residual: float
    multiplier: float | None = None
    iterations: int = 0
    objective_trace: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "stationarity_residual": self.stationarity_residual,
            "complementarity_residual": self.complementarity_residual,
            "feasibility_residual": self.feasibility_residual,
            "multiplier": self.multiplier,
            "iterations": self.iterations,
        }


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Exact Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, v.size + 1)
    rho = np.nonzero(u + (1.0 - css) / j > 0.0)[0][-1]
    theta = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + theta, 0.0)


def _cone_residuals(p: ConeQpProblem, w: np.ndarray) -> tuple[float, float, float]:
    g = p.gradient(w)
    stationarity = float(max(0.0, -float(g.min())))
    complementarity = float(np.max(np.abs(w * g)))
    feasibility = float(max(0.0, -float(w.min())))
    return stationarity, complementarity, feasibility


def _simplex_residuals(
    p: SimplexQpProblem, w: np.ndarray, c: float
) -> tuple[float, float, float]:
    g = p.gradient(w)
    stationarity = float(max(0.0, -float((g - 2.0 * c).min())))
    complementarity = float(np.max(np.abs(w * (g - 2.0 * c))))
    feasibility = float(max(abs(float(w.sum()) - 1.0), max(0.0, -float(w.min()))))
    return stationarity, complementarity, feasibility


def _pg_descent(objective, gradient, project, w0, max_iter, stop):
    """Monotone projected gradient with Barzilai-Borwein step proposals.

    A step is accepted only if it does not increase the objective, so the
    returned trace is nonincreasing.  ``stop(w)`` terminates the phase early.
    """
    w = project(np.array(w0, dtype=float))
    obj = objective(w)
    trace = [obj]
    g = gradient(w)
    gmax = float(np.max(np.abs(g)))
    t = 1.0 / max(gmax, 1.0)
    for _ in range(max_iter):
        if stop(w):
            break
        accepted = False
        step = t
        for _ in range(40):
            w_new = project(w - step * g)
            d = w_new - w
            if float(np.max(np.abs(d))) == 0.0:
                break
            obj_new = objective(w_new)
            if obj_new <= obj:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        g_new = gradient(w_new)
        dg = g_new - g
        dd = float(d @ d)
        ddg = float(d @ dg)
        t = min(max(dd / ddg, 1e-12), 1e12) if ddg > 0.0 else step
        w, g, obj = w_new, g_new, obj_new
        trace.append(obj)
    return w, trace


def _cone_polish(p: ConeQpProblem, w_start: np.ndarray, active_tol: float, max_swaps: int):
    """Active-set refinement on the support detected in ``w_start``.

    Lawson-Hanson style loop: solve the reduced system on the free set, take
    ratio-test steps while the trial point leaves the cone, then admit the
    most violated dual index.  Terminates with exact complementarity on the
    final support (up to linear-solve roundoff).
    """
    Q, b = p.Q, p.b
    k = p.size
    scale = max(1.0, float(np.max(np.abs(b))))
    dual_eps = 1e-12 * scale
    free = w_start > active_tol
    w = np.where(free, np.maximum(w_start, 0.0), 0.0)
    trace = []

    def reduced_solve(mask):
        z = np.zeros(k)
        if mask.any():
            idx = np.flatnonzero(mask)
            z[idx] = np.linalg.solve(Q[np.ix_(idx, idx)], b[idx])
        return z

    for _ in range(max_swaps):
        z = reduced_solve(free)
        inner = 0
        while free.any() and float(z[free].min()) < 0.0 and inner < k + 2:
            bad = free & (z < 0.0) & (w > z)
            if not bad.any():
                break
            alphas = w[bad] / (w[bad] - z[bad])
            alpha = float(alphas.min())
            w = w + alpha * (z - w)
            w[~free] = 0.0
            hit = free & (z <= 0.0) & (w <= dual_eps)
            free[hit] = False
            w[~free] = 0.0
            z = reduced_solve(free)
            inner += 1
        if free.any() and float(z[free].min()) < 0.0:
            # ratio steps stalled; drop the worst index outright
            idx = np.flatnonzero(free)
            free[idx[np.argmin(z[idx])]] = False
            continue
        w = np.where(free, z, 0.0)
        trace.append(p.objective(w))
        g = p.gradient(w)
        candidates = np.flatnonzero(~free & (g < -dual_eps))
        if candidates.size == 0:
            return w, trace, True
        free[candidates[np.argmin(g[candidates])]] = True
    return w, trace, False


def solve_cone_qp(
    p: ConeQpProblem,
    tol: float = SOLVER_TOL,
    max_iter: int = 1000,
    w0: np.ndarray | None = None,
) -> tuple[np.ndarray, KktReport]:
    """Minimize ``w @ Q @ w - 2 b @ w`` over the nonnegative cone.

    Returns the minimizer and a :class:`KktReport` whose residuals satisfy
    the ``tol`` contract: ``g_i >= -tol`` and ``|w_i g_i| <= tol`` for the
    gradient ``g = 2 (Q w - b)``.  Raises :class:`MaxIterExceeded` with the
    best iterate if the contract cannot be met within the budget.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    k = p.size
    # closed forms for the degenerate inputs
    if k == 1:
        w = np.array([max(float(p.b[0]), 0.0) / float(p.Q[0, 0])])
        s, c, fe = _cone_residuals(p, w)
        return w, KktReport(s, c, fe, None, 0, (p.objective(w),))
    if float(p.b.max()) <= 0.0:
        w = np.zeros(k)
        s, c, fe = _cone_residuals(p, w)
        return w, KktReport(s, c, fe, None, 0, (0.0,))

    diag = np.diagonal(p.Q)
    start = np.maximum(p.b, 0.0) / diag if w0 is None else np.maximum(np.asarray(w0, float), 0.0)
    project = lambda v: np.maximum(v, 0.0)  # noqa: E731

    def stop(w):
        s, c, _ = _cone_residuals(p, w)
        return max(s, c) <= 0.1 * tol

    trace_all: list[float] = []
    w = start
    active_tol = 10.0 * tol
    for _ in range(3):
        w, trace = _pg_descent(p.objective, p.gradient, project, w, min(max_iter, 200), stop)
        trace_all.extend(trace)
        w, polish_trace, _ = _cone_polish(p, w, active_tol, max_swaps=3 * k + 30)
        trace_all.extend(polish_trace)
        s, c, fe = _cone_residuals(p, w)
        if max(s, c, fe) <= tol:
            report = KktReport(s, c, fe, None, len(trace_all), tuple(trace_all))
            return w, report
    s, c, fe = _cone_residuals(p, w)
    report = KktReport(s, c, fe, None, len(trace_all), tuple(trace_all))
    raise MaxIterExceeded(
        f"cone solver residuals {max(s, c, fe):.3e} exceed tol {tol:.3e}", w, report
    )


def _simplex_reduced_solve(Q, f, mask):
    """Equality-constrained solve on a candidate support; returns (z, c)."""
    idx = np.flatnonzero(mask)
    s = idx.size
    M = np.zeros((s + 1, s + 1))
    M[:s, :s] = Q[np.ix_(idx, idx)]
    M[:s, s] = -1.0
    M[s, :s] = 1.0
    rhs = np.concatenate([-f[idx], [1.0]])
    sol = np.linalg.solve(M, rhs)
    z = np.zeros(f.size)
    z[idx] = sol[:s]
    return z, float(sol[s])


def _simplex_polish(p: SimplexQpProblem, w_start: np.ndarray, active_tol: float, max_swaps: int):
    """Active-set refinement for the simplex problem; mirrors the cone polish."""
    Q, f = p.Q, p.f
    k = p.size
    scale = max(1.0, float(np.max(np.abs(f))), float(np.max(np.abs(Q))))
    dual_eps = 1e-12 * scale
    support = w_start > active_tol
    if not support.any():
        support[int(np.argmax(w_start))] = True
    w = np.where(support, np.maximum(w_start, 0.0), 0.0)
    total = float(w.sum())
    w = w / total if total > 0.0 else project_simplex(w)
    trace = []
    c = 0.0
    for _ in range(max_swaps):
        z, c = _simplex_reduced_solve(Q, f, support)
        inner = 0
        while float(z[support].min()) < 0.0 and support.sum() > 1 and inner < k + 2:
            bad = support & (z < 0.0) & (w > z)
            if not bad.any():
                break
            alphas = w[bad] / (w[bad] - z[bad])
            alpha = float(alphas.min())
            w = w + alpha * (z - w)
            w[~support] = 0.0
            hit = support & (z <= 0.0) & (w <= dual_eps)
            support[hit] = False
            w[~support] = 0.0
            z, c = _simplex_reduced_solve(Q, f, support)
            inner += 1
        if float(z[support].min()) < 0.0 and support.sum() > 1:
            idx = np.flatnonzero(support)
            support[idx[np.argmin(z[idx])]] = False
            continue
        w = np.where(support, z, 0.0)
        trace.append(p.objective(w))
        eta = (Q @ w + f) - c
        candidates = np.flatnonzero(~support & (eta < -dual_eps))
        if candidates.size == 0:
            return w, c, trace, True
        support[candidates[np.argmin(eta[candidates])]] = True
    return w, c, trace, False


def solve_simplex_qp(
    p: SimplexQpProblem,
    tol: float = SOLVER_TOL,
    max_iter: int = 1000,
    w0: np.ndarray | None = None,
) -> tuple[np.ndarray, KktReport]:
    """Minimize ``w @ Q @ w + 2 f @ w`` over the probability simplex.

    The report's ``multiplier`` is the constant c with ``(Q w + f)_i >= c``
    everywhere and equality on the support.  Raises :class:`MaxIterExceeded`
    if residuals above ``tol`` persist.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    k = p.size
    if k == 1:
        w = np.array([1.0])
        c = float(p.Q[0, 0] + p.f[0])
        s, comp, fe = _simplex_residuals(p, w, c)
        return w, KktReport(s, comp, fe, c, 0, (p.objective(w),))

    start = (
        np.full(k, 1.0 / k) if w0 is None else project_simplex(np.asarray(w0, dtype=float))
    )

    def stop(w):
        g = p.gradient(w)
        sup = w > 10.0 * tol
        c_est = float(np.min(g[sup])) / 2.0 if sup.any() else float(np.min(g)) / 2.0
        s, comp, _ = _simplex_residuals(p, w, c_est)
        return max(s, comp) <= 0.1 * tol

    trace_all: list[float] = []
    w = start
    active_tol = 10.0 * tol
    c = 0.0
    for _ in range(3):
        w, trace = _pg_descent(p.objective, p.gradient, project_simplex, w, min(max_iter, 200), stop)
        trace_all.extend(trace)
        w, c, polish_trace, _ = _simplex_polish(p, w, active_tol, max_swaps=3 * k + 30)
        trace_all.extend(polish_trace)
        s, comp, fe = _simplex_residuals(p, w, c)
        if max(s, comp, fe) <= tol:
            report = KktReport(s, comp, fe, c, len(trace_all), tuple(trace_all))
            return w, report
    s, comp, fe = _simplex_residuals(p, w, c)
    report = KktReport(s, comp, fe, c, len(trace_all), tuple(trace_all))
    raise MaxIterExceeded(
        f"simplex solver residuals {max(s, comp, fe):.3e} exceed tol {tol:.3e}", w, report
    )


_BRUTE_FORCE_LIMIT = 14
_BRUTE_SLACK = 1e-9


def brute_force_cone(p: ConeQpProblem) -> np.ndarray:
    """Exhaustive active-set oracle for the cone problem (k <= 14).

    Enumerates all 2^k free sets, solves the equality-constrained system on
    each, keeps the candidates that are feasible with nonnegative gradient on
    the active set, and returns the one with the least objective.  Exact up
    to linear-solve arithmetic, and independent of the iterative solver.
    """
    k = p.size
    if k > _BRUTE_FORCE_LIMIT:
        raise TooLarge(f"k={k} exceeds the enumeration limit {_BRUTE_FORCE_LIMIT}")
    Q, b = p.Q, p.b
    best_w, best_obj = None, np.inf
    for mask_bits in range(2**k):
        freebool = np.array([(mask_bits >> i) & 1 == 1 for i in range(k)])
        w = np.zeros(k)
        if freebool.any():
            idx = np.flatnonzero(freebool)
            try:
                w[idx] = np.linalg.solve(Q[np.ix_(idx, idx)], b[idx])
            except np.linalg.LinAlgError:
                continue
            if float(w[idx].min()) < -_BRUTE_SLACK:
                continue
        g = p.gradient(w)
        active = ~freebool
        if active.any() and float(g[active].min()) < -_BRUTE_SLACK:
            continue
        obj = p.objective(w)
        if obj < best_obj:
            best_obj, best_w = obj, np.maximum(w, 0.0)
    assert best_w is not None, "enumeration found no KKT candidate"
    return best_w


def brute_force_simplex(p: SimplexQpProblem) -> np.ndarray:
    """Exhaustive support-enumeration oracle for the simplex problem (k <= 14)."""
    k = p.size
    if k > _BRUTE_FORCE_LIMIT:
        raise TooLarge(f"k={k} exceeds the enumeration limit {_BRUTE_FORCE_LIMIT}")
    Q, f = p.Q, p.f
    best_w, best_obj = None, np.inf
    for mask_bits in range(1, 2**k):
        mask = np.array([(mask_bits >> i) & 1 == 1 for i in range(k)])
        try:
            z, c = _simplex_reduced_solve(Q, f, mask)
        except np.linalg.LinAlgError:
            continue
        if float(z[mask].min()) < -_BRUTE_SLACK:
            continue
        eta = (Q @ z + f) - c
        if (~mask).any() and float(eta[~mask].min()) < -_BRUTE_SLACK:
            continue
        obj = p.objective(z)
        if obj < best_obj:
            best_obj, best_w = obj, np.maximum(z, 0.0)
    assert best_w is not None, "enumeration found no KKT candidate"
    return best_w
