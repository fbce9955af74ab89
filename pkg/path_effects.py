"""
Path-specific effects of the protected attribute C on the decision E.

Two path sets are supported: the direct arc C -> E, and all causal paths
from C to E through a redlining set R. An effect SE(c2, c1) is computed by
enumeration: the CPT terms of the children of C whose outgoing arc starts a
path in the set read C = c2, every other term reads C = c1, and P(e+ | c1)
is subtracted.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple

import networkx as nx
import numpy as np

from causal_model import CausalModel, Designation
from errors import FairPathError, InvalidQuery, Unidentifiable
from inference import marginal, truncated_factorization

logger = logging.getLogger(__name__)


class PathKind(Enum):
    DIRECT = 'direct'
    REDLINING = 'redlining'


@dataclass(frozen=True)
class PathQuery:
    """
    Protected attribute C with (c-, c+), decision E with (e-, e+), and a path
    set: the direct arc when redlining is empty, otherwise every causal path
    from C to E passing through the redlining set.
    """
    protected: Designation
    decision: Designation
    redlining: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'redlining', frozenset(self.redlining))

    @classmethod
    def direct(cls, protected: Designation, decision: Designation) -> 'PathQuery':
        return cls(protected, decision)

    @classmethod
    def through(cls, protected: Designation, decision: Designation, redlining: Iterable[str]) -> 'PathQuery':
        redlining = frozenset(redlining)
        if not redlining:
            raise InvalidQuery("redlining set must not be empty")
        return cls(protected, decision, redlining)

    @property
    def kind(self) -> PathKind:
        return PathKind.REDLINING if self.redlining else PathKind.DIRECT

    def with_protected(self, protected: Designation) -> 'PathQuery':
        return replace(self, protected=protected)

    def validate(self, model: CausalModel):
        """Raise InvalidQuery unless the query fits the model."""
        try:
            self.protected.check(model)
            self.decision.check(model)
        except FairPathError as exc:
            raise InvalidQuery(str(exc)) from exc
        cause, decision = self.protected.variable, self.decision.variable
        if cause == decision:
            raise InvalidQuery(f"Protected attribute and decision are both {cause}")
        if model.parents(cause):
            raise InvalidQuery(f"Protected attribute {cause} must have no parents, has {model.parents(cause)}")
        for node in sorted(self.redlining):
            if node not in model.graph:
                raise InvalidQuery(f"Unknown redlining attribute: {node}")
            if node in (cause, decision):
                raise InvalidQuery(f"{node} cannot be a redlining attribute")
        if self.kind is PathKind.DIRECT and not model.graph.has_arc(cause, decision):
            raise InvalidQuery(f"No direct arc {cause} -> {decision}")

    def __str__(self):
        paths = 'direct' if self.kind is PathKind.DIRECT else f"through {','.join(sorted(self.redlining))}"
        return f"{self.protected} -> {self.decision} ({paths})"


@dataclass(frozen=True)
class ChildPartition:
    """Children of C split by whether their outgoing arc starts a path in the set."""
    s_pi: FrozenSet[str]
    s_bar_pi: FrozenSet[str]

    @property
    def witnesses(self) -> FrozenSet[str]:
        return self.s_pi & self.s_bar_pi


@dataclass(frozen=True)
class PathEffect:
    query: PathQuery
    direction: Tuple[str, str]  # (from c1, to c2)
    value: Optional[float]
    identifiable: bool
    witnesses: FrozenSet[str] = field(default_factory=frozenset)


def partition_children(model: CausalModel, query: PathQuery) -> ChildPartition:
    """
    Split Ch(C) minus E into S_pi and S-bar_pi for a redlining query.

    S is in S_pi when some R is S itself or a descendant of S and E descends
    from R. S is in S-bar_pi when it is not in S_pi, or when it also reaches E
    along a path that avoids every redlining node. Depends on the graph only.
    """
    query.validate(model)
    if query.kind is not PathKind.REDLINING:
        raise InvalidQuery("Child partition needs a redlining set")

    graph = model.graph
    cause, decision = query.protected.variable, query.decision.variable
    feeding = {node for node in query.redlining if decision in graph.descendants(node)}
    avoiding = graph.digraph.subgraph([node for node in graph.names if node not in query.redlining])

    s_pi, s_bar_pi = set(), set()
    for child in graph.children(cause):
        if child == decision:
            continue
        downstream = graph.descendants(child) | {child}
        if downstream & feeding:
            s_pi.add(child)
            if child not in query.redlining and nx.has_path(avoiding, child, decision):
                s_bar_pi.add(child)
        else:
            s_bar_pi.add(child)

    partition = ChildPartition(frozenset(s_pi), frozenset(s_bar_pi))
    logger.debug(f"Partition for {query}: S_pi={sorted(s_pi)}, S_bar_pi={sorted(s_bar_pi)}")
    return partition


def recanting_witness_satisfied(model: CausalModel, query: PathQuery) -> Tuple[bool, FrozenSet[str]]:
    """Whether the effect is unidentifiable, with the witness set."""
    query.validate(model)
    if query.kind is PathKind.DIRECT:
        return False, frozenset()
    witnesses = partition_children(model, query).witnesses
    return bool(witnesses), witnesses


def switched_terms(model: CausalModel, query: PathQuery) -> FrozenSet[str]:
    """CPT terms that read the alternative value of C."""
    if query.kind is PathKind.DIRECT:
        query.validate(model)
        return frozenset({query.decision.variable})
    partition = partition_children(model, query)
    if partition.witnesses:
        raise Unidentifiable(partition.witnesses)
    return partition.s_pi


def _substituted_effect(model: CausalModel, query: PathQuery, switched: FrozenSet[str],
                        from_value: str, to_value: str) -> float:
    cause, decision = query.protected.variable, query.decision.variable
    model.variable(cause).index(from_value)
    model.variable(cause).index(to_value)
    if from_value == to_value or not switched:
        return 0.0
    substitutions = {node: {cause: to_value} for node in switched}
    counterfactual = truncated_factorization(
        model, {cause: from_value}, {decision: query.decision.positive}, substitutions)
    factual = marginal(model, {decision: query.decision.positive}, {cause: from_value})
    return float(np.clip(counterfactual - factual, -1.0, 1.0))


def se_direct(model: CausalModel, query: PathQuery, from_value: str, to_value: str) -> PathEffect:
    """Effect along C -> E of changing C from from_value to to_value."""
    if query.kind is not PathKind.DIRECT:
        raise InvalidQuery("se_direct needs a direct query")
    switched = switched_terms(model, query)
    value = _substituted_effect(model, query, switched, from_value, to_value)
    logger.debug(f"SE_direct({to_value},{from_value}) = {value:.6f}")
    return PathEffect(query, (from_value, to_value), value, True)


def se_indirect(model: CausalModel, query: PathQuery, from_value: str, to_value: str) -> PathEffect:
    """Effect along the paths through the redlining set; Unidentifiable when a witness exists."""
    if query.kind is not PathKind.REDLINING:
        raise InvalidQuery("se_indirect needs a redlining query")
    switched = switched_terms(model, query)
    value = _substituted_effect(model, query, switched, from_value, to_value)
    logger.debug(f"SE_indirect({to_value},{from_value}) = {value:.6f}")
    return PathEffect(query, (from_value, to_value), value, True)


def path_specific_effect(model: CausalModel, query: PathQuery, from_value: str, to_value: str) -> PathEffect:
    if query.kind is PathKind.DIRECT:
        return se_direct(model, query, from_value, to_value)
    return se_indirect(model, query, from_value, to_value)
