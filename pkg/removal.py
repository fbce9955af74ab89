"""
Discrimination removal.

Repairs the decision's CPT with the smallest squared Euclidean change of the
joint distribution such that the path-specific effects in both directions
stay at or below tau, then regenerates a dataset from the repaired model.
When the indirect effect is unidentifiable, the arcs into E that close the
redlining paths from each witness are cut first.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from causal_model import Arc, CausalModel, Cpt
from config import Config
from dataset import Dataset, sample_dataset
from discovery import DiscoveryReport, check_query_pair, check_tau, format_value, pse_dd
from errors import InvalidQuery, NotApplicable, SolverFailure, Unidentifiable
from inference import conditional_cpt, factor_values
from path_effects import PathQuery, partition_children, recanting_witness_satisfied, switched_terms
from qp_solver import ActiveSetSolver

logger = logging.getLogger(__name__)


class RemovalMode(Enum):
    """Which effect constraints enter the quadratic program."""
    BOTH = 'both'
    DIRECT = 'direct'
    INDIRECT = 'indirect'

    @property
    def constrains_direct(self) -> bool:
        return self in (RemovalMode.BOTH, RemovalMode.DIRECT)

    @property
    def constrains_indirect(self) -> bool:
        return self in (RemovalMode.BOTH, RemovalMode.INDIRECT)


@dataclass
class RepairProblem:
    """
    Quadratic program over the entries of P'(e | Pa(E)).

    Variable j * |E| + k is the entry for the j-th parent configuration (C
    order over the parent domains) and the k-th value of E. The objective
    1/2 x^T Q x + c^T x + constant equals sum_v (P'(v) - P(v))^2 up to the
    curvature floor on Q.
    """
    model: CausalModel
    reference: CausalModel
    direct: PathQuery
    indirect: PathQuery
    tau: float
    mode: RemovalMode
    Q: np.ndarray
    c: np.ndarray
    constant: float
    A: np.ndarray
    b: np.ndarray
    G: np.ndarray
    h: np.ndarray
    variable_labels: List[str]
    constraint_labels: List[str]

    @property
    def decision(self) -> str:
        return self.direct.decision.variable

    @property
    def size(self) -> int:
        return len(self.c)

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.Q @ x + self.c @ x + self.constant)

    def check_positive_definite(self) -> bool:
        """Cholesky factorization of Q; SolverFailure when it does not exist."""
        try:
            np.linalg.cholesky(self.Q)
        except np.linalg.LinAlgError:
            raise SolverFailure("Objective matrix is not positive definite",
                                {'min_diagonal': float(np.min(np.diag(self.Q)))}) from None
        return True

    def initial_point(self) -> np.ndarray:
        """Uniform CPT: every effect is zero, so it is always feasible."""
        card = self.model.variable(self.decision).cardinality
        return np.full(self.size, 1.0 / card)

    def current_point(self) -> np.ndarray:
        """The model's own E CPT as a variable vector."""
        return np.asarray(self.model.cpt(self.decision).table, dtype=float).ravel()

    def cpt_from_solution(self, x: np.ndarray) -> Cpt:
        """Clip to non-negative and renormalize each row."""
        cpt = self.model.cpt(self.decision)
        table = np.clip(np.asarray(x, dtype=float), 0.0, None).reshape(cpt.table.shape)
        table = table / table.sum(axis=-1, keepdims=True)
        return Cpt(cpt.child, cpt.parents, table)


@dataclass(frozen=True)
class RepairResult:
    repaired_model: CausalModel
    objective_value: float
    removed_arcs: FrozenSet[Arc]
    post_effects: DiscoveryReport
    direct: PathQuery
    indirect: PathQuery
    tau: float
    iterations: int
    mode: RemovalMode = RemovalMode.BOTH
    problem: Optional[RepairProblem] = field(default=None, compare=False, repr=False)

    def to_text(self) -> str:
        """Post-repair report followed by the repair fields."""
        arcs = ','.join(f"{source}->{target}" for source, target in sorted(self.removed_arcs))
        extra = {
            'objective_value': float(self.objective_value),
            'removed_arcs': arcs,
            'solver_iterations': self.iterations,
            'mode': self.mode.value,
        }
        return self.post_effects.to_text() + ''.join(
            f"{key}: {format_value(value)}\n" for key, value in extra.items())


def cut_unidentifiable(model: CausalModel, query: PathQuery) -> Tuple[CausalModel, FrozenSet[Arc]]:
    """
    Remove every arc Q -> E where Q is a redlining node R, or descends from
    one, and R descends from a witness. E's CPT becomes P(e | remaining
    parents) read off the original joint.

    Raises:
        NotApplicable: the query has no recanting witness
    """
    partition = partition_children(model, query)
    if not partition.witnesses:
        raise NotApplicable(f"No recanting witness for {query}")

    decision = query.decision.variable
    removed = set()
    for witness in sorted(partition.witnesses):
        downstream = model.descendants(witness)
        for parent in model.parents(decision):
            for node in query.redlining:
                if node in downstream and (parent == node or parent in model.descendants(node)):
                    removed.add((parent, decision))

    graph = model.graph.without_arcs(removed)
    surgered = model.with_graph(graph, [conditional_cpt(model, decision, graph.parents(decision))])

    remaining = partition_children(surgered, query).witnesses
    if remaining:
        raise Unidentifiable(remaining)
    logger.warning(f"Cut arcs {sorted(removed)} to resolve witnesses {sorted(partition.witnesses)}")
    return surgered, frozenset(removed)


def _variable_index(model: CausalModel, decision: str, states: np.ndarray,
                    overrides: Optional[dict] = None) -> np.ndarray:
    """QP variable index of E's CPT term for each state."""
    cpt = model.cpt(decision)
    shape = cpt.table.shape
    index = []
    for parent in cpt.parent_names:
        if overrides and parent in overrides:
            index.append(np.full(len(states), overrides[parent]))
        else:
            index.append(states[:, model.column(parent)])
    index.append(states[:, model.column(decision)])
    return np.ravel_multi_index(tuple(index), shape)


def _effect_row(model: CausalModel, query: PathQuery, switched: FrozenSet[str],
                from_value: str, to_value: str, size: int) -> np.ndarray:
    """
    Coefficients a such that a^T x is SE(to_value, from_value) with E's CPT
    replaced by x. Both the switched term sum and P(e+ | from_value) are
    linear in the e+ entries.
    """
    cause, decision = query.protected.variable, query.decision.variable
    states = model.state_table
    selected = states[(states[:, model.column(cause)] == model.variable(cause).index(from_value))
                      & (states[:, model.column(decision)] == model.variable(decision).index(query.decision.positive))]
    override = {cause: model.variable(cause).index(to_value)}

    switched_weight = np.ones(len(selected))
    factual_weight = np.ones(len(selected))
    for name in model.names:
        if name in (cause, decision):
            continue
        factual = factor_values(model, name, selected)
        factual_weight *= factual
        switched_weight *= factor_values(model, name, selected, override) if name in switched else factual

    switched_index = _variable_index(model, decision, selected, override if decision in switched else None)
    factual_index = _variable_index(model, decision, selected)
    return (np.bincount(switched_index, weights=switched_weight, minlength=size)
            - np.bincount(factual_index, weights=factual_weight, minlength=size))


def build_repair_problem(model: CausalModel, direct: PathQuery, indirect: PathQuery,
                         tau: Optional[float] = None, mode=RemovalMode.BOTH,
                         reference: Optional[CausalModel] = None) -> RepairProblem:
    """
    Assemble the quadratic program for repairing E's CPT.

    Args:
        model: model whose E CPT is repaired (after surgery, when needed)
        reference: distribution the objective measures distance to; defaults
            to model. Only E's CPT may differ between the two.

    Raises:
        Unidentifiable: indirect constraints requested while a witness exists
    """
    tau = check_tau(Config.TAU if tau is None else tau)
    mode = RemovalMode(mode)
    check_query_pair(direct, indirect)
    direct.validate(model)
    indirect.validate(model)
    reference = model if reference is None else reference
    if reference.variables != model.variables:
        raise InvalidQuery("Reference model has different variables")

    decision = direct.decision.variable
    cause = direct.protected.variable
    e_var = model.variable(decision)
    cpt = model.cpt(decision)
    size = cpt.table.size
    configs = size // e_var.cardinality

    # Objective: P'(v) - P(v) = w_v * (x_t(v) - p_v), w_v the product of the non-E terms
    states = model.state_table
    weights = np.ones(len(states))
    for name in model.names:
        if name != decision:
            weights *= factor_values(model, name, states)
    targets = factor_values(reference, decision, states)
    index = _variable_index(model, decision, states)
    squared = weights ** 2
    diagonal = 2.0 * np.bincount(index, weights=squared, minlength=size)
    c = -2.0 * np.bincount(index, weights=squared * targets, minlength=size)
    constant = float(np.sum(squared * targets ** 2))
    floored = diagonal < Config.QP_RIDGE
    if np.any(floored):
        logger.warning(f"{int(floored.sum())} CPT entries have no weight in the objective, flooring curvature at {Config.QP_RIDGE}")
    Q = np.diag(np.maximum(diagonal, Config.QP_RIDGE))

    # One normalization row per parent configuration
    A = np.kron(np.eye(configs), np.ones((1, e_var.cardinality)))
    b = np.ones(configs)

    rows, labels = [], []
    c_neg, c_pos = direct.protected.negative, direct.protected.positive
    bound = max(tau - Config.REPAIR_MARGIN, 0.0)
    queries = []
    if mode.constrains_direct:
        queries.append(('se_direct', direct))
    if mode.constrains_indirect:
        queries.append(('se_indirect', indirect))
    for name, query in queries:
        switched = switched_terms(model, query)
        rows.append(_effect_row(model, query, switched, c_neg, c_pos, size))
        labels.append(f"{name}({c_pos},{c_neg}) <= tau")
        rows.append(_effect_row(model, query, switched, c_pos, c_neg, size))
        labels.append(f"{name}({c_neg},{c_pos}) <= tau")
    G = np.vstack(rows + [-np.eye(size)])
    h = np.concatenate([np.full(len(rows), bound), np.zeros(size)])

    variable_labels = []
    for parent_labels, _ in cpt.rows():
        condition = ','.join(f"{parent}={label}" for parent, label in zip(cpt.parent_names, parent_labels))
        for value in e_var.domain:
            variable_labels.append(f"P({decision}={value} | {condition})" if condition else f"P({decision}={value})")
    labels.extend(f"{label} >= 0" for label in variable_labels)

    logger.info(f"Repair problem: {size} variables, {len(b)} equalities, {len(h)} inequalities "
                f"({mode.value}, tau={tau}, cause {cause})")
    return RepairProblem(model, reference, direct, indirect, float(tau), mode,
                         Q, c, constant, A, b, G, h, variable_labels, labels)


def solve_repair(problem: RepairProblem, max_iterations: Optional[int] = None) -> RepairResult:
    """
    Solve the repair problem from the uniform CPT and recompute the effects
    on the repaired model.

    Raises:
        SolverFailure: KKT conditions not reached within the iteration budget
    """
    problem.check_positive_definite()
    solver = ActiveSetSolver(max_iterations)
    solution = solver.solve(problem.Q, problem.c, problem.A, problem.b,
                            problem.G, problem.h, problem.initial_point())
    repaired = problem.model.with_cpt(problem.cpt_from_solution(solution.x))
    objective = max(problem.objective(solution.x), 0.0)
    logger.info(f"Repair solved in {solution.iterations} iterations, objective {objective:.6e}")

    post = pse_dd(repaired, problem.direct, problem.indirect, problem.tau)
    return RepairResult(repaired, objective, frozenset(), post, problem.direct, problem.indirect,
                        problem.tau, solution.iterations, problem.mode, problem)


def pse_dr(model: CausalModel, direct: PathQuery, indirect: PathQuery, n: int,
           tau: Optional[float] = None, seed: Optional[int] = None, mode=RemovalMode.BOTH,
           sampling: str = 'ancestral', max_iterations: Optional[int] = None) -> Tuple[RepairResult, Dataset]:
    """
    Remove direct and indirect discrimination and regenerate n rows.

    Graph surgery runs first when the indirect constraints are requested and
    the redlining query has a recanting witness. The objective is always
    measured against the input model.
    """
    mode = RemovalMode(mode)
    working, removed = model, frozenset()
    if mode.constrains_indirect:
        unidentifiable, _ = recanting_witness_satisfied(model, indirect)
        if unidentifiable:
            working, removed = cut_unidentifiable(model, indirect)

    problem = build_repair_problem(working, direct, indirect, tau, mode, reference=model)
    result = replace(solve_repair(problem, max_iterations), removed_arcs=removed)
    data = sample_dataset(result.repaired_model, n, seed, sampling)
    return result, data


def remove_all_dependence(model: CausalModel, query: PathQuery) -> CausalModel:
    """
    Full-independence baseline: E's CPT becomes P(e | parents that are
    neither C nor descendants of C), cutting every causal path from C to E.
    """
    query.validate(model)
    cause, decision = query.protected.variable, query.decision.variable
    downstream = model.descendants(cause) | {cause}
    removed = [(parent, decision) for parent in model.parents(decision) if parent in downstream]
    graph = model.graph.without_arcs(removed)
    logger.info(f"Removed all dependence of {decision} on {cause}: cut {removed}")
    return model.with_graph(graph, [conditional_cpt(model, decision, graph.parents(decision))])
