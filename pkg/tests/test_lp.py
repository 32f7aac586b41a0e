import numpy as np
import pytest
from scipy.optimize import linprog

from markov_infodesign.lp import LinearProgram, presolve, solve_lp


def random_lp(rng, n=6, m_eq=2, m_ub=3):
    A_eq = rng.normal(size=(m_eq, n))
    x0 = rng.uniform(0, 1, size=n)
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = A_ub @ x0 + rng.uniform(0, 1, size=m_ub)
    A_ub = np.vstack([A_ub, np.ones((1, n))])                 # keeps the problem bounded
    b_ub = np.append(b_ub, x0.sum() + 1.0)
    return LinearProgram(rng.normal(size=n), A_eq, A_eq @ x0, A_ub, b_ub)


def test_matches_scipy(rng):
    for _ in range(100):
        lp = random_lp(rng, n=int(rng.integers(3, 9)), m_eq=int(rng.integers(0, 3)))
        ref = linprog(-lp.c, A_ub=lp.A_ub, b_ub=lp.b_ub, A_eq=lp.A_eq if len(lp.b_eq) else None,
                      b_eq=lp.b_eq if len(lp.b_eq) else None, bounds=(0, None), method="highs")
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(-ref.fun, abs=1e-7)
        assert np.abs(lp.A_eq @ sol.x - lp.b_eq).max(initial=0) < 1e-8
        assert (lp.A_ub @ sol.x - lp.b_ub).max() < 1e-8


def test_infeasible_certificate(rng):
    for _ in range(50):
        n = 5
        A = rng.normal(size=(2, n))
        x0 = rng.uniform(0, 1, size=n)
        # x >= 0 with sum(x) <= 1 and sum(x) >= 2 is infeasible
        lp = LinearProgram(rng.normal(size=n), A, A @ x0, np.vstack([np.ones(n), -np.ones(n)]),
                           np.array([1.0, -2.0]))
        sol = solve_lp(lp)
        assert sol.status == "infeasible"
        y_eq, y_ub = sol.certificate["eq"], sol.certificate["ub"]
        assert np.all(y_ub >= -1e-9)
        assert np.all(y_eq @ lp.A_eq + y_ub @ lp.A_ub >= -1e-8)
        assert y_eq @ lp.b_eq + y_ub @ lp.b_ub < -1e-9


def test_unbounded_raises():
    from markov_infodesign.lp import UnboundedError
    lp = LinearProgram(np.array([1.0, 0.0]), np.zeros((0, 2)), np.zeros(0), np.array([[0.0, 1.0]]),
                       np.array([1.0]))
    with pytest.raises(UnboundedError):
        solve_lp(lp)


def test_deterministic_degenerate_vertex():
    # every feasible vertex is optimal; Bland's rule makes the choice reproducible
    lp = LinearProgram(np.ones(3), np.ones((1, 3)), np.array([1.0]), np.zeros((0, 3)), np.zeros(0))
    runs = {tuple(solve_lp(lp).x) for _ in range(5)}
    assert len(runs) == 1
    assert solve_lp(lp).objective == pytest.approx(1.0)


def test_presolve_removes_fixed_variables():
    A = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
    lp = LinearProgram(np.array([5.0, 1.0, 2.0]), A, np.array([0.0, 1.0]), np.zeros((0, 3)), np.zeros(0))
    red, cols, rows = presolve(lp)
    assert cols.tolist() == [1, 2] and rows.tolist() == [1]
    sol = solve_lp(lp)
    np.testing.assert_allclose(sol.x, [0.0, 0.0, 1.0])


def test_presolve_detects_empty_row():
    lp = LinearProgram(np.ones(2), np.array([[1.0, 0.0], [1.0, 0.0]]), np.array([0.0, 1.0]),
                       np.zeros((0, 2)), np.zeros(0))
    sol = solve_lp(lp)
    assert sol.status == "infeasible"
    y = sol.certificate["eq"]
    assert np.all(y @ lp.A_eq >= 0) and y @ lp.b_eq < 0


def test_shape_validation():
    with pytest.raises(ValueError):
        LinearProgram(np.ones(2), np.ones((1, 2)), np.ones(2), np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(ValueError):
        LinearProgram(np.ones(2), np.array([[np.nan, 1.0]]), np.ones(1), np.zeros((0, 2)), np.zeros(0))


def test_text_dump():
    lp = LinearProgram(np.array([1.0, -2.0]), np.array([[1.0, 1.0]]), np.array([1.0]),
                       np.array([[1.0, 0.0]]), np.array([0.5]), var_names=("x", "y"),
                       eq_names=("mass",), ub_names=("cap",))
    text = lp.to_text()
    assert text.splitlines() == ["vars 2 eq 1 ub 1", "max +1*x -2*y", "mass: +1*x +1*y = 1",
                                 "cap: +1*x <= 0.5"]


def test_presolve_certificate_truly_empty_row():
    lp = LinearProgram(np.ones(2), np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([-3.0, 1.0]),
                       np.zeros((0, 2)), np.zeros(0))
    sol = solve_lp(lp)
    y = sol.certificate["eq"]
    assert sol.status == "infeasible" and np.all(y @ lp.A_eq >= 0) and y @ lp.b_eq < 0


def test_certificate_covers_presolved_columns(rng):
    # x2 is fixed to zero by a singleton row and would otherwise absorb the infeasibility
    A_eq = np.array([[0.0, 0.0, 1.0], [1.0, 1.0, -1.0]])
    lp = LinearProgram(np.ones(3), A_eq, np.array([0.0, -1.0]), np.zeros((0, 3)), np.zeros(0))
    sol = solve_lp(lp)
    assert sol.status == "infeasible"
    y = sol.certificate["eq"]
    assert np.all(y @ lp.A_eq >= -1e-12) and y @ lp.b_eq < 0
