import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpot.qp import (
    ConeQpProblem,
    MaxIterExceeded,
    SimplexQpProblem,
    TooLarge,
    brute_force_cone,
    brute_force_simplex,
    project_simplex,
    solve_cone_qp,
    solve_simplex_qp,
)


def random_cone(seed, k=None, kmax=10):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, kmax + 1)) if k is None else k
    basis = rng.random((k, k + 2))
    Q = basis @ basis.T
    Q = (Q + Q.T) / 2.0
    Q[np.diag_indices(k)] += 0.5
    return ConeQpProblem(Q, rng.standard_normal(k))


def random_simplex(seed, k=None, kmax=10):
    p = random_cone(seed, k, kmax)
    rng = np.random.default_rng(seed + 10**7)
    return SimplexQpProblem(p.Q, rng.standard_normal(p.size))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def test_cone_one_dimensional_closed_form():
    w, report = solve_cone_qp(ConeQpProblem([[2.0]], [3.0]))
    assert w[0] == pytest.approx(1.5)
    assert report.complementarity_residual <= 1e-12
    w, _ = solve_cone_qp(ConeQpProblem([[2.0]], [-3.0]))
    assert w[0] == 0.0


def test_cone_nonpositive_rhs_gives_zero():
    rng = np.random.default_rng(5)
    basis = rng.random((6, 8))
    Q = basis @ basis.T
    Q = (Q + Q.T) / 2.0 + 0.5 * np.eye(6)
    Q = (Q + Q.T) / 2.0
    w, report = solve_cone_qp(ConeQpProblem(Q, -rng.random(6)))
    assert np.all(w == 0.0)
    assert report.stationarity_residual == 0.0


def test_simplex_identity_symmetric_split():
    w, report = solve_simplex_qp(SimplexQpProblem(np.eye(2), np.zeros(2)))
    assert np.allclose(w, [0.5, 0.5], atol=1e-12)
    # multiplier convention: (Q w + f)_i >= c with equality on the support
    assert report.multiplier == pytest.approx(0.5, abs=1e-12)


def test_simplex_singleton():
    w, report = solve_simplex_qp(SimplexQpProblem([[3.0]], [1.5]))
    assert w[0] == 1.0
    assert report.multiplier == pytest.approx(4.5)


# ---------------------------------------------------------------------------
# oracle equivalence (smoke; the full 200-instance sweep is in acceptance)
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(25))
def test_cone_solver_matches_oracle(seed):
    p = random_cone(seed)
    w, report = solve_cone_qp(p)
    ref = brute_force_cone(p)
    assert np.max(np.abs(w - ref)) <= 1e-8
    assert abs(p.objective(w) - p.objective(ref)) <= 1e-10
    assert report.stationarity_residual <= 1e-8
    assert report.complementarity_residual <= 1e-8


@pytest.mark.parametrize("seed", range(25))
def test_simplex_solver_matches_oracle(seed):
    p = random_simplex(seed)
    w, report = solve_simplex_qp(p)
    ref = brute_force_simplex(p)
    assert np.max(np.abs(w - ref)) <= 1e-8
    assert abs(p.objective(w) - p.objective(ref)) <= 1e-10
    assert abs(float(w.sum()) - 1.0) <= 1e-10


def test_brute_force_rejects_large_instances():
    with pytest.raises(TooLarge):
        brute_force_cone(random_cone(0, k=15, kmax=15))
    with pytest.raises(TooLarge):
        brute_force_simplex(random_simplex(0, k=15, kmax=15))


@given(st.integers(0, 10**9))
@settings(max_examples=30, deadline=None)
def test_cone_oracle_equivalence_property(seed):
    p = random_cone(seed)
    w, _ = solve_cone_qp(p)
    ref = brute_force_cone(p)
    assert np.max(np.abs(w - ref)) <= 1e-8
    assert abs(p.objective(w) - p.objective(ref)) <= 1e-10


@given(st.integers(0, 10**9))
@settings(max_examples=30, deadline=None)
def test_simplex_oracle_equivalence_property(seed):
    p = random_simplex(seed)
    w, _ = solve_simplex_qp(p)
    ref = brute_force_simplex(p)
    assert np.max(np.abs(w - ref)) <= 1e-8
    assert abs(p.objective(w) - p.objective(ref)) <= 1e-10


# ---------------------------------------------------------------------------
# solver behavior contracts
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(8))
def test_uniqueness_from_distinct_starts(seed):
    p = random_cone(seed, k=7, kmax=7)
    rng = np.random.default_rng(seed + 99)
    sols = []
    for _ in range(5):
        w0 = rng.random(7) * 3.0
        w, _ = solve_cone_qp(p, w0=w0)
        sols.append(w)
    for a in sols:
        for b in sols:
            assert np.max(np.abs(a - b)) <= 1e-7

    ps = random_simplex(seed, k=7, kmax=7)
    sols = []
    for _ in range(5):
        w0 = project_simplex(rng.standard_normal(7))
        w, _ = solve_simplex_qp(ps, w0=w0)
        sols.append(w)
    for a in sols:
        for b in sols:
            assert np.max(np.abs(a - b)) <= 1e-7


@pytest.mark.parametrize("seed", range(10))
def test_objective_trace_is_nonincreasing(seed):
    p = random_cone(seed)
    _, report = solve_cone_qp(p)
    trace = report.objective_trace
    assert all(trace[j + 1] <= trace[j] + 1e-10 for j in range(len(trace) - 1))
    ps = random_simplex(seed)
    _, report = solve_simplex_qp(ps)
    trace = report.objective_trace
    assert all(trace[j + 1] <= trace[j] + 1e-10 for j in range(len(trace) - 1))


@pytest.mark.parametrize("q", [0.5, 2.0, 10.0])
def test_cone_scaling_equivariance(q):
    p = random_cone(17, k=6, kmax=6)
    w, _ = solve_cone_qp(p)
    wq, _ = solve_cone_qp(ConeQpProblem(p.Q, q * p.b))
    assert np.max(np.abs(wq - q * w)) <= 1e-8 * max(1.0, q)


def test_max_iter_exceeded_carries_best_iterate():
    # a wide dense instance cannot polish to exactly-zero residuals, so an
    # unattainable tolerance must surface as the documented error
    rng = np.random.default_rng(42)
    k = 40
    basis = rng.random((k, k + 3))
    Q = basis @ basis.T
    Q = (Q + Q.T) / 2.0
    Q[np.diag_indices(k)] += 0.5
    p = ConeQpProblem(Q, rng.standard_normal(k) * 10.0)
    w, _ = solve_cone_qp(p)
    with pytest.raises(MaxIterExceeded) as err:
        solve_cone_qp(p, tol=1e-300)
    assert err.value.best_w.shape == (k,)
    assert np.max(np.abs(err.value.best_w - w)) <= 1e-10
    assert err.value.report.complementarity_residual > 0.0


def test_problem_validation():
    with pytest.raises(ValueError):
        ConeQpProblem([[1.0, 0.2], [0.1, 1.0]], [0.0, 0.0])
    with pytest.raises(ValueError):
        SimplexQpProblem(np.eye(2), [0.0])
    with pytest.raises(ValueError):
        solve_cone_qp(random_cone(0), tol=0.0)


# ---------------------------------------------------------------------------
# simplex projection properties
# ---------------------------------------------------------------------------


@given(st.integers(0, 10**6), st.integers(1, 30))
@settings(max_examples=80)
def test_project_simplex_feasible(seed, k):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(k) * rng.uniform(0.1, 10)
    w = project_simplex(v)
    assert np.all(w >= 0.0)
    assert float(w.sum()) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 10**6), st.integers(1, 12))
@settings(max_examples=40)
def test_project_simplex_fixes_feasible_points(seed, k):
    rng = np.random.default_rng(seed)
    w = rng.random(k)
    w = w / w.sum()
    assert np.max(np.abs(project_simplex(w) - w)) <= 1e-12


@given(st.integers(0, 10**6), st.integers(2, 10))
@settings(max_examples=40)
def test_project_simplex_is_nearest_point(seed, k):
    # the projection beats random feasible points in Euclidean distance
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(k) * 2.0
    w = project_simplex(v)
    for _ in range(20):
        other = rng.random(k)
        other = other / other.sum()
        assert np.sum((v - w) ** 2) <= np.sum((v - other) ** 2) + 1e-12
