import numpy as np
import pytest

import oracles
from causal_model import Cpt
from dataset import sample_dataset
from discovery import DiscoveryReport
from errors import InvalidQuery, NotApplicable
from inference import marginal, risk_difference
from metrics import chi_square_utility
from path_effects import recanting_witness_satisfied, se_direct, se_indirect
from removal import (RemovalMode, RepairResult, build_repair_problem, cut_unidentifiable, pse_dr,
                     remove_all_dependence, solve_repair)
from toy_models import LOAN, RACE, random_case, two_node_case

TAU = 0.05
SLACK = 1e-6


def assert_repaired(report: DiscoveryReport, tau: float = TAU):
    for value in report.se_direct:
        assert value <= tau + SLACK
    if report.se_indirect is not None:
        for value in report.se_indirect:
            assert value <= tau + SLACK
    assert report.judge_direct is False
    assert report.judge_indirect is not True


def random_feasible_point(problem, rng):
    card = problem.model.variable(problem.decision).cardinality
    rows = rng.dirichlet(np.ones(card), size=problem.size // card)
    return rows.ravel()


def test_surgery_on_witness(witness):
    surgered, removed = cut_unidentifiable(witness.model, witness.indirect)
    assert removed == {('Z2', 'Y')}
    assert not surgered.graph.has_arc('Z2', 'Y')
    assert recanting_witness_satisfied(surgered, witness.indirect) == (False, frozenset())
    assert surgered.parents('Y') == ['Z1', 'X']
    for name in ('X', 'Z1', 'Z2'):
        assert surgered.cpt(name) is witness.model.cpt(name)
    expected = oracles.conditional(witness.model, {'Y': 'y1'}, {'Z1': 'a1', 'X': 'x0'})
    assert surgered.cpt('Y').probability('y1', ['a1', 'x0']) == pytest.approx(expected, abs=1e-12)


def test_surgery_needs_witness(loan):
    with pytest.raises(NotApplicable):
        cut_unidentifiable(loan.model, loan.indirect)


def test_problem_shape(loan):
    problem = build_repair_problem(loan.model, loan.direct, loan.indirect, TAU)
    assert problem.size == 16
    assert problem.A.shape == (8, 16)
    assert problem.G.shape == (20, 16)
    assert len(problem.constraint_labels) == 20
    assert len(problem.variable_labels) == 16
    assert problem.variable_labels[1] == 'P(Loan=e+ | Race=c-,Zip=z0,Income=low)'
    assert problem.check_positive_definite()

    direct_only = build_repair_problem(loan.model, loan.direct, loan.indirect, TAU, RemovalMode.DIRECT)
    assert direct_only.G.shape == (18, 16)


def test_effect_rows_match_effects(loan):
    problem = build_repair_problem(loan.model, loan.direct, loan.indirect, TAU)
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = random_feasible_point(problem, rng)
        model = loan.model.with_cpt(problem.cpt_from_solution(x))
        expected = [
            se_direct(model, loan.direct, 'c-', 'c+').value,
            se_direct(model, loan.direct, 'c+', 'c-').value,
            se_indirect(model, loan.indirect, 'c-', 'c+').value,
            se_indirect(model, loan.indirect, 'c+', 'c-').value,
        ]
        assert problem.G[:4] @ x == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize('seed', range(5))
def test_objective_is_squared_distance(seed):
    case = random_case(seed)
    problem = build_repair_problem(case.model, case.direct, case.indirect, TAU, RemovalMode.DIRECT)
    rng = np.random.default_rng(seed)
    x = random_feasible_point(problem, rng)
    changed = case.model.with_cpt(problem.cpt_from_solution(x))
    before, after = oracles.joint(case.model), oracles.joint(changed)
    expected = sum((after[key] - before[key]) ** 2 for key in before)
    assert problem.objective(x) == pytest.approx(expected, abs=1e-10)
    assert problem.objective(problem.current_point()) == pytest.approx(0.0, abs=1e-12)


def test_fair_model_is_unchanged(fair_loan):
    problem = build_repair_problem(fair_loan.model, fair_loan.direct, fair_loan.indirect, TAU)
    result = solve_repair(problem)
    assert np.allclose(result.repaired_model.cpt('Loan').table, fair_loan.model.cpt('Loan').table, atol=1e-9)
    assert result.objective_value <= 1e-12


def test_loan_repair(loan):
    result, data = pse_dr(loan.model, loan.direct, loan.indirect, 500, TAU, seed=1)
    assert_repaired(result.post_effects)
    assert result.removed_arcs == frozenset()
    for name in ('Race', 'Zip', 'Income'):
        assert result.repaired_model.cpt(name) is loan.model.cpt(name)
    assert result.repaired_model.cpt('Loan') != loan.model.cpt('Loan')
    assert result.objective_value > 0
    assert len(data) == 500
    # the binding constraint is the forward redlining effect
    assert result.post_effects.se_indirect[0] == pytest.approx(TAU, abs=1e-6)


def test_two_node_optimum_matches_grid():
    case = two_node_case()
    problem = build_repair_problem(case.model, case.direct, case.indirect, TAU)
    result = solve_repair(problem)
    table = result.repaired_model.cpt('E').table
    assert table[0, 1] == pytest.approx(0.475, abs=1e-6)
    assert table[1, 1] == pytest.approx(0.525, abs=1e-6)
    assert result.objective_value == pytest.approx(0.0703125, abs=1e-6)

    # objective is 0.25 * ((a - 0.1)^2 + (b - 0.9)^2) under |b - a| <= tau
    grid = np.arange(0.0, 1.0 + 1e-9, 1e-4)
    b = np.clip(0.9, grid - TAU, grid + TAU)
    best = float(np.min(0.25 * ((grid - 0.1) ** 2 + (b - 0.9) ** 2)))
    assert result.objective_value == pytest.approx(best, abs=1e-6)


def test_mediator_repair(mediator):
    result, _ = pse_dr(mediator.model, mediator.direct, mediator.indirect, 100, TAU, seed=0)
    assert_repaired(result.post_effects)


def test_witness_repair(witness):
    result, data = pse_dr(witness.model, witness.direct, witness.indirect, 200, TAU, seed=3)
    assert result.removed_arcs == {('Z2', 'Y')}
    assert not result.post_effects.indeterminate
    assert_repaired(result.post_effects)
    assert 'removed_arcs: Z2->Y' in result.to_text()
    assert data.names == ['X', 'Z1', 'Z2', 'Y']


def test_direct_mode_skips_surgery(witness):
    result, _ = pse_dr(witness.model, witness.direct, witness.indirect, 50, TAU, seed=0, mode='direct')
    assert result.removed_arcs == frozenset()
    assert result.mode is RemovalMode.DIRECT
    assert result.post_effects.indeterminate
    assert result.post_effects.judge_direct is False


def test_indirect_mode(mediator):
    result, _ = pse_dr(mediator.model, mediator.direct, mediator.indirect, 50, TAU, seed=0, mode='indirect')
    assert result.post_effects.judge_indirect is False
    assert result.post_effects.judge_direct is True


def test_repair_is_deterministic(loan):
    first = pse_dr(loan.model, loan.direct, loan.indirect, 300, TAU, seed=11)
    second = pse_dr(loan.model, loan.direct, loan.indirect, 300, TAU, seed=11)
    assert first[0] == second[0]
    assert first[1] == second[1]
    assert first[0].to_text() == second[0].to_text()


def test_result_text_parses_as_report(loan):
    result, _ = pse_dr(loan.model, loan.direct, loan.indirect, 10, TAU, seed=0)
    text = result.to_text()
    assert DiscoveryReport.from_text(text) == result.post_effects
    assert 'mode: both' in text
    assert f"solver_iterations: {result.iterations}" in text


def test_negative_tau(loan):
    with pytest.raises(InvalidQuery):
        build_repair_problem(loan.model, loan.direct, loan.indirect, -0.1)


def test_nan_tau(loan):
    with pytest.raises(InvalidQuery):
        build_repair_problem(loan.model, loan.direct, loan.indirect, float('nan'))
    with pytest.raises(InvalidQuery):
        pse_dr(loan.model, loan.direct, loan.indirect, 5, float('nan'))


def test_zero_tau(mediator):
    result, _ = pse_dr(mediator.model, mediator.direct, mediator.indirect, 10, 0.0, seed=0)
    effects = result.post_effects.se_direct + result.post_effects.se_indirect
    assert max(effects) <= SLACK


@pytest.mark.parametrize('seed', range(100))
def test_random_models_are_repaired(seed):
    case = random_case(seed)
    result, _ = pse_dr(case.model, case.direct, case.indirect, 10, TAU, seed=seed)
    assert_repaired(result.post_effects)
    problem = result.problem
    assert problem.check_positive_definite()


def test_full_independence_baseline(loan):
    baseline = remove_all_dependence(loan.model, loan.direct)
    assert baseline.parents('Loan') == []
    assert risk_difference(baseline, RACE, LOAN) == pytest.approx(0.0, abs=1e-12)
    assert marginal(baseline, {'Loan': 'e+'}) == pytest.approx(marginal(loan.model, {'Loan': 'e+'}), abs=1e-12)


def test_repair_keeps_more_utility_than_full_independence(loan):
    original = sample_dataset(loan.model, 20000, seed=0, method='expected')
    result, repaired = pse_dr(loan.model, loan.direct, loan.indirect, 20000, TAU, seed=0, sampling='expected')
    flattened = sample_dataset(remove_all_dependence(loan.model, loan.direct), 20000, seed=0, method='expected')
    assert chi_square_utility(original, repaired) < chi_square_utility(original, flattened)


def test_result_is_frozen(loan):
    result, _ = pse_dr(loan.model, loan.direct, loan.indirect, 10, TAU, seed=0)
    assert isinstance(result, RepairResult)
    with pytest.raises(AttributeError):
        result.tau = 0.2


def test_uniform_cpt_is_feasible(mediator):
    problem = build_repair_problem(mediator.model, mediator.direct, mediator.indirect, TAU)
    x = problem.initial_point()
    assert np.all(problem.G @ x <= problem.h + 1e-12)
    assert problem.A @ x == pytest.approx(problem.b)
    cpt = problem.cpt_from_solution(x)
    assert isinstance(cpt, Cpt)
