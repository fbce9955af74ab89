import pytest

import oracles
from causal_model import Designation, build_model
from errors import InvalidQuery, Unidentifiable
from inference import conditional_cpt
from path_effects import (PathKind, PathQuery, partition_children, path_specific_effect,
                          recanting_witness_satisfied, se_direct, se_indirect, switched_terms)
from toy_models import LOAN, RACE, random_case


def test_query_kinds():
    assert PathQuery.direct(RACE, LOAN).kind is PathKind.DIRECT
    assert PathQuery.through(RACE, LOAN, ['Zip']).kind is PathKind.REDLINING
    with pytest.raises(InvalidQuery):
        PathQuery.through(RACE, LOAN, [])


def test_loan_partition(loan):
    partition = partition_children(loan.model, loan.indirect)
    assert partition.s_pi == {'Zip'}
    assert partition.s_bar_pi == {'Income'}
    assert partition.witnesses == frozenset()


def test_witness_partition(witness):
    partition = partition_children(witness.model, witness.indirect)
    assert partition.s_pi == {'Z1'}
    assert partition.s_bar_pi == {'Z1'}
    assert recanting_witness_satisfied(witness.model, witness.indirect) == (True, frozenset({'Z1'}))


def test_isolated_redlining_node(two_node):
    partition = partition_children(two_node.model, two_node.indirect)
    assert partition.s_pi == frozenset() and partition.s_bar_pi == frozenset()
    assert se_indirect(two_node.model, two_node.indirect, 'c-', 'c+').value == 0.0


@pytest.mark.parametrize('seed', range(20))
def test_partition_matches_path_enumeration(seed):
    case = random_case(seed, middle=4)
    partition = partition_children(case.model, case.indirect)
    s_pi, s_bar_pi = oracles.partition_by_paths(case.model.graph, 'C', 'E', case.indirect.redlining)
    assert partition.s_pi == s_pi
    assert partition.s_bar_pi == s_bar_pi


def test_loan_effects(loan):
    model = loan.model
    assert se_direct(model, loan.direct, 'c-', 'c+').value == pytest.approx(0.025, abs=1e-12)
    assert se_direct(model, loan.direct, 'c+', 'c-').value == pytest.approx(-0.025, abs=1e-12)
    assert se_indirect(model, loan.indirect, 'c-', 'c+').value == pytest.approx(0.12, abs=1e-12)
    assert se_indirect(model, loan.indirect, 'c+', 'c-').value == pytest.approx(-0.12, abs=1e-12)


def test_mediator_effects(mediator):
    model = mediator.model
    assert se_direct(model, mediator.direct, 'c-', 'c+').value == pytest.approx(0.2125, abs=1e-12)
    assert se_direct(model, mediator.direct, 'c+', 'c-').value == pytest.approx(-0.235, abs=1e-12)
    assert se_indirect(model, mediator.indirect, 'c-', 'c+').value == pytest.approx(0.135, abs=1e-12)
    assert se_indirect(model, mediator.indirect, 'c+', 'c-').value == pytest.approx(-0.1575, abs=1e-12)


@pytest.mark.parametrize('seed', range(100))
def test_effects_match_enumeration(seed):
    case = random_case(seed)
    model = case.model
    for from_value, to_value in (('c-', 'c+'), ('c+', 'c-')):
        expected = oracles.substituted_effect(model, 'C', 'E', 'e+', {'E'}, from_value, to_value)
        assert se_direct(model, case.direct, from_value, to_value).value == pytest.approx(expected, abs=1e-10)

    witnessed, _ = recanting_witness_satisfied(model, case.indirect)
    if witnessed:
        with pytest.raises(Unidentifiable):
            se_indirect(model, case.indirect, 'c-', 'c+')
        return
    s_pi, _ = oracles.partition_by_paths(model.graph, 'C', 'E', case.indirect.redlining)
    for from_value, to_value in (('c-', 'c+'), ('c+', 'c-')):
        expected = oracles.substituted_effect(model, 'C', 'E', 'e+', s_pi, from_value, to_value)
        assert se_indirect(model, case.indirect, from_value, to_value).value == pytest.approx(expected, abs=1e-10)


def test_null_effect(loan):
    assert se_direct(loan.model, loan.direct, 'c+', 'c+').value == 0.0
    assert se_indirect(loan.model, loan.indirect, 'c-', 'c-').value == 0.0


def test_fair_model_has_no_effects(fair_loan):
    model = fair_loan.model
    for query in (fair_loan.direct, fair_loan.indirect):
        assert path_specific_effect(model, query, 'c-', 'c+').value == pytest.approx(0.0, abs=1e-12)


def test_unidentifiable_carries_witnesses(witness):
    with pytest.raises(Unidentifiable) as info:
        se_indirect(witness.model, witness.indirect, 'x0', 'x1')
    assert info.value.witnesses == {'Z1'}
    with pytest.raises(Unidentifiable):
        switched_terms(witness.model, witness.indirect)


def test_switched_terms(loan):
    assert switched_terms(loan.model, loan.direct) == {'Loan'}
    assert switched_terms(loan.model, loan.indirect) == {'Zip'}


def test_invalid_queries(loan):
    model = loan.model
    with pytest.raises(InvalidQuery):
        PathQuery.through(RACE, LOAN, {'Nope'}).validate(model)
    with pytest.raises(InvalidQuery):
        PathQuery.through(RACE, LOAN, {'Race'}).validate(model)
    with pytest.raises(InvalidQuery):
        PathQuery.direct(RACE, Designation('Race', 'c-', 'c+')).validate(model)
    with pytest.raises(InvalidQuery):
        PathQuery.direct(Designation('Zip', 'z0', 'z1'), LOAN).validate(model)
    with pytest.raises(InvalidQuery):
        PathQuery.direct(Designation('Race', 'c-', 'white'), LOAN).validate(model)
    with pytest.raises(InvalidQuery):
        se_direct(model, loan.indirect, 'c-', 'c+')
    with pytest.raises(InvalidQuery):
        se_indirect(model, loan.direct, 'c-', 'c+')


def test_direct_query_needs_arc():
    case = random_case(0)
    graph = case.model.graph.without_arcs([('C', 'E')])
    assert not graph.has_arc('C', 'E')
    model = build_model(graph, [case.model.cpt(name) for name in graph.names if name != 'E']
                        + [conditional_cpt(case.model, 'E', graph.parents('E'))])
    with pytest.raises(InvalidQuery):
        case.direct.validate(model)
