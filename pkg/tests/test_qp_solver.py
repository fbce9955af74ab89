import numpy as np
import pytest

from config import Config
from errors import SolverFailure
from qp_solver import ActiveSetSolver, kkt_residuals

SIMPLEX = dict(A=[[1.0, 1.0]], b=[1.0], G=-np.eye(2), h=np.zeros(2))


def nearest(target):
    """min ||x - target||^2 in QP form."""
    target = np.asarray(target, dtype=float)
    return 2.0 * np.eye(len(target)), -2.0 * target


def test_projection_onto_simplex():
    Q, c = nearest([0.0, 0.0])
    solution = ActiveSetSolver().solve(Q, c, x0=[1.0, 0.0], **SIMPLEX)
    assert solution.x == pytest.approx([0.5, 0.5], abs=1e-12)
    assert solution.active_set == ()


def test_bound_becomes_active():
    Q, c = nearest([2.0, -1.0])
    solution = ActiveSetSolver().solve(Q, c, x0=[0.5, 0.5], **SIMPLEX)
    assert solution.x == pytest.approx([1.0, 0.0], abs=1e-12)
    assert solution.active_set == (1,)
    assert solution.inequality_multipliers[1] > 0
    # objective without the constant ||target||^2 = 5
    assert solution.objective + 5.0 == pytest.approx(2.0, abs=1e-12)


def test_inequalities_only():
    Q, c = nearest([0.5, 0.5])
    solution = ActiveSetSolver().solve(Q, c, np.zeros((0, 2)), np.zeros(0),
                                       [[1.0, 0.0]], [0.3], [0.0, 0.0])
    assert solution.x == pytest.approx([0.3, 0.5], abs=1e-12)
    assert solution.inequality_multipliers[0] == pytest.approx(0.4, abs=1e-10)


def test_residuals_within_tolerance():
    Q, c = nearest([2.0, -1.0])
    solution = ActiveSetSolver().solve(Q, c, x0=[0.5, 0.5], **SIMPLEX)
    primal, stationarity = kkt_residuals(Q, c, np.asarray(SIMPLEX['A']), np.asarray(SIMPLEX['b']),
                                         SIMPLEX['G'], SIMPLEX['h'], solution.x,
                                         solution.equality_multipliers, solution.inequality_multipliers)
    assert primal <= Config.PRIMAL_TOL
    assert stationarity <= Config.KKT_TOL
    assert solution.primal_residual == pytest.approx(primal)


def test_infeasible_start():
    Q, c = nearest([0.0, 0.0])
    with pytest.raises(SolverFailure) as info:
        ActiveSetSolver().solve(Q, c, x0=[1.0, 1.0], **SIMPLEX)
    assert info.value.diagnostics['primal_residual'] == pytest.approx(1.0)


def test_iteration_budget():
    Q, c = nearest([2.0, -1.0])
    with pytest.raises(SolverFailure) as info:
        ActiveSetSolver(max_iter=1).solve(Q, c, x0=[0.5, 0.5], **SIMPLEX)
    assert info.value.diagnostics['iterations'] == 1
    assert 'stationarity_residual' in info.value.diagnostics


def test_budget_read_from_environment(monkeypatch):
    monkeypatch.setenv('FAIRPATH_SOLVER_ITERS', '7')
    assert ActiveSetSolver().max_iter == 7


@pytest.mark.parametrize('seed', range(5))
def test_matches_grid_search(seed):
    rng = np.random.default_rng(seed)
    target = rng.uniform(-0.5, 1.5, size=2)
    Q, c = nearest(target)
    # x0 + x1 = 1, x >= 0, x0 - x1 <= 0.2
    G = np.vstack([[[1.0, -1.0]], -np.eye(2)])
    h = np.array([0.2, 0.0, 0.0])
    solution = ActiveSetSolver().solve(Q, c, SIMPLEX['A'], SIMPLEX['b'], G, h, [0.5, 0.5])
    grid = np.arange(0.0, 0.6 + 1e-9, 1e-4)
    values = (grid - target[0]) ** 2 + (1.0 - grid - target[1]) ** 2
    best = float(values.min())
    assert solution.objective + float(target @ target) == pytest.approx(best, abs=1e-6)
