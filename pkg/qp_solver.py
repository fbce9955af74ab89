"""
Dense convex quadratic programming.

    min 1/2 x^T Q x + c^T x
    s.t. A x = b
         G x <= h

Primal active-set method started from a feasible point. Each iteration solves
the equality-constrained subproblem for the current working set through its
KKT system, then either takes a step (adding the first blocking constraint)
or drops the constraint with the most negative multiplier.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from config import Config
from errors import SolverFailure

logger = logging.getLogger(__name__)


@dataclass
class QPSolution:
    x: np.ndarray
    objective: float
    iterations: int
    active_set: Tuple[int, ...]
    equality_multipliers: np.ndarray
    inequality_multipliers: np.ndarray
    primal_residual: float
    stationarity_residual: float


def kkt_residuals(Q, c, A, b, G, h, x, nu, mu) -> Tuple[float, float]:
    """(primal infeasibility, stationarity residual), both max-abs."""
    primal = 0.0
    if len(b):
        primal = max(primal, float(np.max(np.abs(A @ x - b))))
    if len(h):
        primal = max(primal, float(np.max(G @ x - h, initial=0.0)))
    gradient = Q @ x + c + A.T @ nu + G.T @ mu
    return primal, float(np.max(np.abs(gradient), initial=0.0))


class ActiveSetSolver:
    """Primal active-set solver for a positive definite Q."""

    def __init__(self, max_iter: Optional[int] = None):
        self.max_iter = max_iter if max_iter is not None else Config.solver_iterations()

    def _solve_kkt(self, Q, gradient, constraints) -> Tuple[np.ndarray, np.ndarray]:
        n, m = Q.shape[0], constraints.shape[0]
        kkt = np.block([
            [Q, constraints.T],
            [constraints, np.zeros((m, m))],
        ])
        rhs = np.concatenate([-gradient, np.zeros(m)])
        try:
            solution = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            logger.debug("Singular KKT matrix, using least squares")
            solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        return solution[:n], solution[n:]

    def solve(self, Q, c, A, b, G, h, x0) -> QPSolution:
        """
        Solve the QP from a feasible starting point.

        Args:
            Q: (n, n) symmetric positive definite matrix
            c: (n,) linear term
            A, b: equality constraints
            G, h: inequality constraints G x <= h
            x0: feasible starting point

        Raises:
            SolverFailure: infeasible start, or no KKT point within max_iter
        """
        Q, c = np.asarray(Q, dtype=float), np.asarray(c, dtype=float)
        A, b = np.asarray(A, dtype=float), np.asarray(b, dtype=float)
        G, h = np.asarray(G, dtype=float), np.asarray(h, dtype=float)
        n = Q.shape[0]
        A = A.reshape(-1, n)
        G = G.reshape(-1, n)
        x = np.array(x0, dtype=float)

        start_residual, _ = kkt_residuals(Q, c, A, b, G, h, x, np.zeros(len(b)), np.zeros(len(h)))
        if start_residual > Config.PRIMAL_TOL:
            raise SolverFailure("Starting point is infeasible", {'primal_residual': start_residual})

        # Only the minimizer matters, so rescale the objective for conditioning
        scale = max(float(np.max(np.abs(np.diag(Q)), initial=0.0)), np.finfo(float).tiny)
        Qs, cs = Q / scale, c / scale

        working: List[int] = []
        step_tol = 1e-12
        for iteration in range(1, self.max_iter + 1):
            constraints = np.vstack([A, G[working]]) if working else A
            gradient = Qs @ x + cs
            step, multipliers = self._solve_kkt(Qs, gradient, constraints)

            if np.max(np.abs(step), initial=0.0) <= step_tol * (1.0 + np.max(np.abs(x), initial=0.0)):
                mu_working = multipliers[len(b):]
                if len(working) == 0 or mu_working.min() >= -step_tol:
                    return self._finish(Q, c, A, b, G, h, x, working, multipliers * scale, iteration)
                leaving = working[int(np.argmin(mu_working))]
                logger.debug(f"Iteration {iteration}: dropping constraint {leaving}")
                working.remove(leaving)
                continue

            alpha, blocking = 1.0, None
            slopes = G @ step
            slacks = h - G @ x
            for i in range(len(h)):
                if i in working or slopes[i] <= step_tol:
                    continue
                ratio = max(slacks[i], 0.0) / slopes[i]
                if ratio < alpha:
                    alpha, blocking = ratio, i
            x = x + alpha * step
            if blocking is not None:
                logger.debug(f"Iteration {iteration}: step {alpha:.3e}, adding constraint {blocking}")
                working.append(blocking)

        nu, mu = self._multipliers(Q, c, A, G, x, working)
        primal, stationarity = kkt_residuals(Q, c, A, b, G, h, x, nu, mu)
        raise SolverFailure("Active-set iteration budget exhausted", {
            'iterations': self.max_iter,
            'primal_residual': primal,
            'stationarity_residual': stationarity,
            'working_set': len(working),
        })

    def _multipliers(self, Q, c, A, G, x, working) -> Tuple[np.ndarray, np.ndarray]:
        """Least-squares multipliers for the equalities and the working set."""
        constraints = np.vstack([A, G[working]]) if working else A
        coefficients = np.linalg.lstsq(constraints.T, -(Q @ x + c), rcond=None)[0]
        mu = np.zeros(G.shape[0])
        mu[working] = coefficients[A.shape[0]:]
        return coefficients[:A.shape[0]], mu

    def _finish(self, Q, c, A, b, G, h, x, working, multipliers, iteration) -> QPSolution:
        nu = multipliers[:A.shape[0]]
        mu = np.zeros(G.shape[0])
        mu[working] = np.maximum(multipliers[A.shape[0]:], 0.0)
        primal, stationarity = kkt_residuals(Q, c, A, b, G, h, x, nu, mu)
        if primal > Config.PRIMAL_TOL or stationarity > Config.KKT_TOL:
            raise SolverFailure("KKT conditions not met", {
                'iterations': iteration,
                'primal_residual': primal,
                'stationarity_residual': stationarity,
            })
        objective = float(0.5 * x @ Q @ x + c @ x)
        logger.debug(f"Active set converged in {iteration} iterations, working set {sorted(working)}")
        return QPSolution(x, objective, iteration, tuple(sorted(working)), nu, mu, primal, stationarity)
