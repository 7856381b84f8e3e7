import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchortop import lp
from anchortop.lp import LinearProgram, LpStatus, decode_omega, omega_program, solve

from oracles import vertex_enumeration


def random_lp(seed):
    """Feasible, bounded LP with at most 30 columns once slacks are added."""
    rng = np.random.default_rng(seed)
    nv = int(rng.integers(2, 7))
    m = int(rng.integers(1, 5))
    G = rng.normal(size=(m, nv))
    z0 = rng.uniform(0, 1, size=nv)
    h = G @ z0 + rng.uniform(0, 0.5, size=m)
    # A box row keeps the problem bounded.
    G = np.vstack([G, np.ones(nv)])
    h = np.concatenate([h, [nv + 1.0]])
    c = rng.normal(size=nv)
    return c, G, h


def test_one_variable_bound():
    sol = solve(LinearProgram([1.0], [[-1.0]], [-3.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.z[0] == pytest.approx(3.0)


def test_textbook_instance():
    sol = solve(LinearProgram([-1.0, -1.0], [[1.0, 1.0]], [1.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(-1.0)
    assert sol.z.sum() == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    infeasible = LinearProgram([1.0], [[1.0], [-1.0]], [1.0, -2.0])
    assert solve(infeasible).status is LpStatus.INFEASIBLE
    unbounded = LinearProgram([-1.0, 0.0], [[-1.0, 1.0]], [1.0])
    assert solve(unbounded).status is LpStatus.UNBOUNDED


def test_free_variables():
    # min |y| written as min t s.t. -t <= y - 2 <= t with y free.
    G = [[1.0, -1.0], [-1.0, -1.0]]
    sol = solve(LinearProgram([0.0, 1.0], G, [2.0, -2.0], nonneg=[False, True]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.z[0] == pytest.approx(2.0) and sol.z[1] == pytest.approx(0.0)


def test_iteration_limit():
    sol = solve(LinearProgram([-1.0, -1.0], [[1.0, 1.0]], [1.0]), max_iter=0)
    assert sol.status is LpStatus.ITERATION_LIMIT
    assert np.all(np.isnan(sol.z))


def test_invalid_programs():
    with pytest.raises(ValueError):
        LinearProgram([1.0, 2.0], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        LinearProgram([np.inf], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        solve(LinearProgram([1.0], [[1.0]], [1.0]), tol=0)


def test_degenerate_cycling_example():
    # Beale's classic cycling instance; Bland's rule must terminate.
    c = [-0.75, 150.0, -0.02, 6.0]
    G = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
    sol = solve(LinearProgram(c, G, [0.0, 0.0, 1.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(-0.05)


@pytest.mark.parametrize("seed", range(100))
def test_matches_vertex_enumeration(seed):
    c, G, h = random_lp(seed)
    assert G.shape[1] + G.shape[0] <= 30
    ref, _ = vertex_enumeration(c, G, h)
    sol = solve(LinearProgram(c, G, h))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(ref, abs=1e-6)
    assert np.all(G @ sol.z <= h + 1e-7) and np.all(sol.z >= -1e-9)


# ---------------------------------------------------------------------------
# omega programs


def test_omega_program_shape():
    prog = omega_program(np.eye(3), 1, 0.1)
    assert prog.n_vars == 9 and prog.n_rows == 7


@pytest.mark.parametrize("scale", [1.0, 2.0])
def test_omega_diagonal(scale):
    K = 4
    for k in range(K):
        sol = solve(omega_program(scale * np.eye(K), k, 0.0))
        omega = decode_omega(sol, K)
        expected = np.zeros(K)
        expected[k] = 1 / scale
        np.testing.assert_allclose(omega, expected, atol=1e-12)
        assert sol.objective_value == pytest.approx(1 / scale)


def _check_certificate(theta, k, lam):
    K = theta.shape[0]
    sol = solve(omega_program(theta, k, lam))
    assert sol.status is LpStatus.OPTIMAL
    omega = decode_omega(sol, K)
    e = np.eye(K)[k]
    assert np.abs(theta @ omega - e).sum() <= lam * np.abs(omega).sum() + 1e-7
    return omega


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(0, 4))
def test_omega_no_worse_than_inverse(seed, k):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(5, 5))
    theta = B @ B.T + 5 * np.eye(5)
    lam = 0.01 * np.abs(theta).sum(axis=1).max()
    omega = _check_certificate(theta, k, lam)
    truth = np.linalg.solve(theta, np.eye(5)[k])
    assert np.abs(omega).sum() <= np.abs(truth).sum() + 1e-9


def test_complementarity_warning(caplog):
    sol = lp.LpSolution(LpStatus.OPTIMAL, np.array([1.0, 0.5, 0.5, 0.0]), 2.0, 1)
    np.testing.assert_allclose(decode_omega(sol, 2), [0.5, 0.5])
    assert "not complementary" in caplog.text
