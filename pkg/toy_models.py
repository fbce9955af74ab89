"""
Small causal models used by the examples and the test suite.
"""
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from causal_model import CausalGraph, CausalModel, Cpt, Designation, Variable, build_model
from path_effects import PathQuery

logger = logging.getLogger(__name__)

RACE = Designation('Race', 'c-', 'c+')
LOAN = Designation('Loan', 'e-', 'e+')


class Case(NamedTuple):
    model: CausalModel
    direct: PathQuery
    indirect: PathQuery


def loan_model(direct_gap: float = 0.025, zip_gap: float = 0.2, income_gap: float = 0.5,
               base: float = 0.15) -> CausalModel:
    """
    Race -> Zip, Race -> Income, Race -> Loan, Zip -> Loan, Income -> Loan.

    P(e+ | race, zip, income) = base + direct_gap [c+] + zip_gap [z1] +
    income_gap [high]. P(z1 | c-) = 0.2 and P(z1 | c+) = 0.8, so the
    redlining effect through Zip is 0.6 * zip_gap and the direct effect is
    direct_gap.
    """
    race = Variable('Race', ('c-', 'c+'))
    zip_code = Variable('Zip', ('z0', 'z1'))
    income = Variable('Income', ('low', 'high'))
    loan = Variable('Loan', ('e-', 'e+'))
    graph = CausalGraph([race, zip_code, income, loan], [
        ('Race', 'Loan'), ('Race', 'Zip'), ('Race', 'Income'), ('Zip', 'Loan'), ('Income', 'Loan'),
    ])

    table = np.zeros((2, 2, 2, 2))
    for c in range(2):
        for z in range(2):
            for i in range(2):
                positive = base + direct_gap * c + zip_gap * z + income_gap * i
                if not 0.0 <= positive <= 1.0:
                    raise ValueError(f"P(e+) = {positive} out of range")
                table[c, z, i] = (1.0 - positive, positive)

    return build_model(graph, [
        Cpt(race, [], [0.5, 0.5]),
        Cpt(zip_code, [race], [[0.8, 0.2], [0.2, 0.8]]),
        Cpt(income, [race], [[0.6, 0.4], [0.4, 0.6]]),
        Cpt(loan, [race, zip_code, income], table),
    ])


def loan_case(**gaps) -> Case:
    """Loan model with the direct query and the redlining query through Zip."""
    return Case(loan_model(**gaps), PathQuery.direct(RACE, LOAN), PathQuery.through(RACE, LOAN, {'Zip'}))


def seeded_loan_case(seed: int) -> Case:
    """
    Loan case with seeded gaps. The redlining effect lies between 0.06 and
    0.156 and the direct effect below 0.01. Repairs at thresholds down to
    0.04 keep P(e+) below 0.5 for low income and above it for high income.
    """
    rng = np.random.default_rng(seed)
    return loan_case(direct_gap=float(rng.uniform(0.0, 0.01)), zip_gap=float(rng.uniform(0.1, 0.26)),
                     income_gap=0.5, base=float(rng.uniform(0.1, 0.15)))


def fair_loan_case() -> Case:
    """Loan depends on Income only; Income depends on Race but is not redlining."""
    return loan_case(direct_gap=0.0, zip_gap=0.0)


def witness_case() -> Case:
    """
    X -> Z1, Z1 -> Z2, Z2 -> Y, Z1 -> Y, X -> Y with redlining set {Z2}.
    Z1 starts both a path through Z2 and the path Z1 -> Y, so it is a
    recanting witness. The direct effect of X on Y is 0.01 in every context.
    """
    x = Variable('X', ('x0', 'x1'))
    z1 = Variable('Z1', ('a0', 'a1'))
    z2 = Variable('Z2', ('b0', 'b1'))
    y = Variable('Y', ('y0', 'y1'))
    graph = CausalGraph([x, z1, z2, y], [
        ('X', 'Z1'), ('Z1', 'Z2'), ('Z2', 'Y'), ('Z1', 'Y'), ('X', 'Y'),
    ])
    model = build_model(graph, [
        Cpt(x, [], [0.45, 0.55]),
        Cpt(z1, [x], [[0.7, 0.3], [0.25, 0.75]]),
        Cpt(z2, [z1], [[0.8, 0.2], [0.3, 0.7]]),
        Cpt(y, [z2, z1, x], [
            [[[0.9, 0.1], [0.89, 0.11]], [[0.7, 0.3], [0.69, 0.31]]],
            [[[0.5, 0.5], [0.49, 0.51]], [[0.3, 0.7], [0.29, 0.71]]],
        ]),
    ])
    protected = Designation('X', 'x0', 'x1')
    decision = Designation('Y', 'y0', 'y1')
    return Case(model, PathQuery.direct(protected, decision), PathQuery.through(protected, decision, {'Z2'}))


def chain_model(p_x1: float = 0.4, p_y1_x1: float = 0.8, p_y1_x0: float = 0.3) -> CausalModel:
    """X -> Y."""
    x = Variable('X', ('x0', 'x1'))
    y = Variable('Y', ('y0', 'y1'))
    graph = CausalGraph([x, y], [('X', 'Y')])
    return build_model(graph, [
        Cpt(x, [], [1 - p_x1, p_x1]),
        Cpt(y, [x], [[1 - p_y1_x0, p_y1_x0], [1 - p_y1_x1, p_y1_x1]]),
    ])


def two_node_case(p_pos: float = 0.9, p_neg: float = 0.1, p_c: float = 0.5) -> Case:
    """
    C -> E plus an isolated redlining node R, so that the indirect effect is
    structurally zero.
    """
    c = Variable('C', ('c-', 'c+'))
    r = Variable('R', ('r0', 'r1'))
    e = Variable('E', ('e-', 'e+'))
    graph = CausalGraph([c, r, e], [('C', 'E')])
    model = build_model(graph, [
        Cpt(c, [], [1 - p_c, p_c]),
        Cpt(r, [], [0.5, 0.5]),
        Cpt(e, [c], [[1 - p_neg, p_neg], [1 - p_pos, p_pos]]),
    ])
    protected, decision = Designation('C', 'c-', 'c+'), Designation('E', 'e-', 'e+')
    return Case(model, PathQuery.direct(protected, decision), PathQuery.through(protected, decision, {'R'}))


def mediator_case() -> Case:
    """C -> M -> E and C -> E, with M redlining; violates tau = 0.05 on both paths."""
    c = Variable('C', ('c-', 'c+'))
    m = Variable('M', ('m0', 'm1'))
    e = Variable('E', ('e-', 'e+'))
    graph = CausalGraph([c, m, e], [('C', 'M'), ('C', 'E'), ('M', 'E')])
    model = build_model(graph, [
        Cpt(c, [], [0.4, 0.6]),
        Cpt(m, [c], [[0.75, 0.25], [0.3, 0.7]]),
        Cpt(e, [c, m], [[[0.8, 0.2], [0.5, 0.5]], [[0.6, 0.4], [0.25, 0.75]]]),
    ])
    protected, decision = Designation('C', 'c-', 'c+'), Designation('E', 'e-', 'e+')
    return Case(model, PathQuery.direct(protected, decision), PathQuery.through(protected, decision, {'M'}))


def random_case(seed: int, middle: int = 3, arc_probability: float = 0.5,
                low: float = 0.05, high: float = 0.95) -> Case:
    """
    Seeded random binary model: C first and parentless, E last with C -> E,
    `middle` nodes in between with random forward arcs. The redlining set
    is a random non-empty subset of the middle nodes.
    """
    if middle < 1:
        raise ValueError("random_case needs at least one middle node")
    rng = np.random.default_rng(seed)
    c = Variable('C', ('c-', 'c+'))
    e = Variable('E', ('e-', 'e+'))
    inner = [Variable(f"V{k}", ('v0', 'v1')) for k in range(1, middle + 1)]
    order = [c] + inner + [e]

    arcs = [('C', 'E')]
    for j in range(1, len(order)):
        for i in range(j):
            if (i, j) == (0, len(order) - 1):
                continue
            if rng.random() < arc_probability:
                arcs.append((order[i].name, order[j].name))
    graph = CausalGraph(order, arcs)

    cpts = []
    for variable in order:
        parents = [graph.variable(parent) for parent in graph.parents(variable.name)]
        shape = tuple(parent.cardinality for parent in parents)
        positive = rng.uniform(low, high, size=shape)
        cpts.append(Cpt(variable, parents, np.stack([1.0 - positive, positive], axis=-1)))
    model = build_model(graph, cpts)

    size = int(rng.integers(1, middle + 1))
    redlining = {inner[k].name for k in rng.choice(middle, size=size, replace=False)}
    protected, decision = Designation('C', 'c-', 'c+'), Designation('E', 'e-', 'e+')
    return Case(model, PathQuery.direct(protected, decision), PathQuery.through(protected, decision, redlining))


def case_by_name(name: str, seed: Optional[int] = None) -> Case:
    """Look up a fixture by name."""
    cases = {
        'loan': loan_case,
        'fair-loan': fair_loan_case,
        'witness': witness_case,
        'mediator': mediator_case,
        'two-node': two_node_case,
    }
    if name == 'random':
        return random_case(0 if seed is None else seed)
    if name not in cases:
        raise KeyError(f"Unknown fixture {name!r}, expected one of {sorted(cases) + ['random']}")
    return cases[name]()


def fixture_names() -> Tuple[str, ...]:
    return ('loan', 'fair-loan', 'witness', 'mediator', 'two-node', 'random')
