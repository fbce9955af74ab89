"""
Exact discrete inference.

Every quantity is a literal sum over the model's joint state table:
observational probabilities use the factorization P(v) = prod P(v|Pa(V)),
post-intervention probabilities use the truncated factorization that drops
the intervened node's term.
"""
import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from causal_model import CausalModel, Cpt, Designation, NodeRef, node_name
from config import Config
from errors import InvalidAssignment, ZeroConditioningEvent

logger = logging.getLogger(__name__)

# node -> {parent: label that node's term reads for that parent}
Substitutions = Mapping[str, Mapping[str, str]]


@dataclass(frozen=True)
class InterventionQuery:
    """P(target = target_value | do(intervened = intervened_value))."""
    target: str
    target_value: str
    intervened: str
    intervened_value: str

    def validate(self, model: CausalModel):
        if self.target == self.intervened:
            raise InvalidAssignment(f"Target and intervened variable are both {self.target}")
        model.variable(self.target).index(self.target_value)
        model.variable(self.intervened).index(self.intervened_value)


def _clip(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


def _mask(model: CausalModel, states: np.ndarray, encoded: Mapping[str, int]) -> np.ndarray:
    mask = np.ones(len(states), dtype=bool)
    for name, index in encoded.items():
        mask &= states[:, model.column(name)] == index
    return mask


def factor_values(model: CausalModel, node: NodeRef, states: np.ndarray,
                  overrides: Optional[Mapping[str, int]] = None) -> np.ndarray:
    """
    P(v | Pa(V)) evaluated on every row of states.

    Args:
        overrides: parent -> domain index the term reads instead of the state's value
    """
    name = node_name(node)
    cpt = model.cpt(name)
    index = []
    for parent in cpt.parent_names:
        if overrides and parent in overrides:
            index.append(overrides[parent])
        else:
            index.append(states[:, model.column(parent)])
    index.append(states[:, model.column(name)])
    return cpt.table[tuple(index)]


def joint_distribution(model: CausalModel) -> np.ndarray:
    """P(v) for every row of model.state_table."""
    states = model.state_table
    joint = np.ones(len(states))
    for name in model.names:
        joint *= factor_values(model, name, states)
    return joint


def probability(model: CausalModel, event: Mapping[str, str]) -> float:
    """Observational probability of a (partial) assignment."""
    encoded = model.encode(event)
    states = model.state_table
    selected = states[_mask(model, states, encoded)]
    product = np.ones(len(selected))
    for name in model.names:
        product *= factor_values(model, name, selected)
    return _clip(product.sum())


def marginal(model: CausalModel, event: Mapping[str, str],
             given: Optional[Mapping[str, str]] = None) -> float:
    """P(event | given)."""
    if not event:
        raise InvalidAssignment("event must bind at least one variable")
    given = dict(given or {})
    overlap = set(event) & set(given)
    if overlap:
        raise InvalidAssignment(f"event and evidence both bind {sorted(overlap)}")

    joint = probability(model, {**event, **given})
    if not given:
        return joint
    evidence = probability(model, given)
    if evidence <= Config.FAIL_THRESHOLD:
        raise ZeroConditioningEvent(f"P({given}) = {evidence!r}")
    return _clip(joint / evidence)


def truncated_factorization(model: CausalModel, intervened: Mapping[str, str],
                            event: Mapping[str, str],
                            substitutions: Optional[Substitutions] = None) -> float:
    """
    Sum over states consistent with intervened and event of the product of all
    non-intervened CPT terms.

    substitutions makes individual terms read a different value for a parent
    than the one in the state (the delta-substitution of path-specific effects).
    """
    forced = model.encode(intervened)
    observed = model.encode(event)
    for name, index in observed.items():
        if name in forced and forced[name] != index:
            return 0.0

    states = model.state_table
    selected = states[_mask(model, states, {**observed, **forced})]
    product = np.ones(len(selected))
    for name in model.names:
        if name in forced:
            continue
        overrides = None
        if substitutions and name in substitutions:
            overrides = model.encode(substitutions[name])
        product *= factor_values(model, name, selected, overrides)
    return float(product.sum())


def post_intervention(model: CausalModel, query: InterventionQuery) -> float:
    """P(y | do(x)) by the truncated factorization."""
    query.validate(model)
    return _clip(truncated_factorization(
        model, {query.intervened: query.intervened_value}, {query.target: query.target_value}))


def total_effect(model: CausalModel, cause: NodeRef, from_value: str, to_value: str,
                 target: NodeRef, target_value: str) -> float:
    """TE = P(y | do(to_value)) - P(y | do(from_value))."""
    cause, target = node_name(cause), node_name(target)
    if cause == target:
        raise InvalidAssignment(f"Cause and target are both {cause}")
    if from_value == to_value:
        model.variable(cause).index(from_value)
        model.variable(target).index(target_value)
        return 0.0
    after = post_intervention(model, InterventionQuery(target, target_value, cause, to_value))
    before = post_intervention(model, InterventionQuery(target, target_value, cause, from_value))
    return after - before


def risk_difference(model: CausalModel, protected: Designation, decision: Designation) -> float:
    """P(e+ | c+) - P(e+ | c-)."""
    protected.check(model)
    decision.check(model)
    positive = marginal(model, {decision.variable: decision.positive}, {protected.variable: protected.positive})
    negative = marginal(model, {decision.variable: decision.positive}, {protected.variable: protected.negative})
    return positive - negative


def conditional_cpt(model: CausalModel, child: NodeRef, parents: Sequence[str]) -> Cpt:
    """
    P(child | parents) read off the model's joint distribution, for any parent
    set. Parent configurations with zero probability get a uniform row.
    """
    child = model.variable(child)
    parent_vars = [model.variable(parent) for parent in parents]
    states = model.state_table
    joint = joint_distribution(model)

    shape = tuple(parent.cardinality for parent in parent_vars) + (child.cardinality,)
    columns = [states[:, model.column(parent)] for parent in parent_vars] + [states[:, model.column(child)]]
    cells = np.ravel_multi_index(tuple(columns), shape)
    table = np.bincount(cells, weights=joint, minlength=int(np.prod(shape))).reshape(shape)

    totals = table.sum(axis=-1, keepdims=True)
    empty = totals[..., 0] <= Config.FAIL_THRESHOLD
    if np.any(empty):
        logger.debug(f"{child.name}: {int(empty.sum())} parent configurations with zero probability, using uniform rows")
    table = np.where(totals > Config.FAIL_THRESHOLD, table / np.where(totals > 0, totals, 1.0), 1.0 / child.cardinality)
    return Cpt(child, parent_vars, table)
