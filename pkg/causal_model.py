"""
Discrete causal network.
Variables with ordered finite domains, an acyclic arc set and one
conditional probability table (CPT) per node.
"""
import itertools
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from config import Config
from errors import (CptShapeMismatch, CycleDetected, DuplicateArc, EnumerationTooLarge,
                    InvalidAssignment, InvalidCpt, InvalidVariable, MissingCpt, UnknownNode)

logger = logging.getLogger(__name__)

LABEL_PATTERN = re.compile(r'^[A-Za-z0-9_+\-]+$')

# variable name -> domain label; partial or full
Assignment = Dict[str, str]
Arc = Tuple[str, str]


@dataclass(frozen=True)
class Variable:
    """A categorical attribute with an ordered domain of at least two labels."""
    name: str
    domain: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'domain', tuple(self.domain))
        if not isinstance(self.name, str) or not LABEL_PATTERN.match(self.name):
            raise InvalidVariable(f"Invalid variable name: {self.name!r}")
        if len(self.domain) < 2:
            raise InvalidVariable(f"{self.name}: domain needs at least two labels, got {self.domain}")
        if len(set(self.domain)) != len(self.domain):
            raise InvalidVariable(f"{self.name}: duplicate domain labels in {self.domain}")
        for label in self.domain:
            if not isinstance(label, str) or not LABEL_PATTERN.match(label):
                raise InvalidVariable(f"{self.name}: invalid label {label!r}")

    @property
    def cardinality(self) -> int:
        return len(self.domain)

    def index(self, label: str) -> int:
        """Position of a label in the domain."""
        try:
            return self.domain.index(label)
        except ValueError:
            raise InvalidAssignment(f"{label!r} is not in the domain of {self.name} {self.domain}") from None


NodeRef = Union[str, Variable]


def node_name(node: NodeRef) -> str:
    return node.name if isinstance(node, Variable) else node


@dataclass(frozen=True)
class Designation:
    """
    A binary contrast inside one variable's domain.
    Used for the protected attribute (c-, c+) and the decision (e-, e+).
    """
    variable: str
    negative: str
    positive: str

    def __post_init__(self):
        if self.negative == self.positive:
            raise InvalidAssignment(f"{self.variable}: negative and positive labels are both {self.negative!r}")

    @classmethod
    def parse(cls, text: str) -> 'Designation':
        """Parse 'NAME:NEG,POS'."""
        name, sep, labels = text.partition(':')
        parts = [part.strip() for part in labels.split(',')]
        if not sep or len(parts) != 2 or not name.strip() or not all(parts):
            raise InvalidAssignment(f"Expected NAME:NEG,POS, got {text!r}")
        return cls(name.strip(), parts[0], parts[1])

    def swapped(self) -> 'Designation':
        return Designation(self.variable, self.positive, self.negative)

    def check(self, model: 'CausalModel') -> Variable:
        """Resolve against a model; both labels must be in the domain."""
        variable = model.variable(self.variable)
        variable.index(self.negative)
        variable.index(self.positive)
        return variable

    def __str__(self):
        return f"{self.variable}:{self.negative},{self.positive}"


class CausalGraph:
    """Directed acyclic graph over declared variables."""

    def __init__(self, variables: Iterable[Variable], arcs: Iterable[Tuple[NodeRef, NodeRef]] = ()):
        self._variables: Dict[str, Variable] = {}
        for variable in variables:
            if variable.name in self._variables:
                raise InvalidVariable(f"Variable declared twice: {variable.name}")
            self._variables[variable.name] = variable

        graph = nx.DiGraph()
        graph.add_nodes_from(self._variables)
        self._arcs: List[Arc] = []
        for source, target in arcs:
            source, target = node_name(source), node_name(target)
            for endpoint in (source, target):
                if endpoint not in self._variables:
                    raise UnknownNode(endpoint)
            if source == target:
                raise CycleDetected([(source, target)])
            if graph.has_edge(source, target):
                raise DuplicateArc(source, target)
            graph.add_edge(source, target)
            self._arcs.append((source, target))

        if not nx.is_directed_acyclic_graph(graph):
            raise CycleDetected(nx.find_cycle(graph))

        self._declared = {name: position for position, name in enumerate(self._variables)}
        self._graph = nx.freeze(graph)

    @property
    def digraph(self) -> nx.DiGraph:
        """Frozen networkx view of the structure."""
        return self._graph

    @property
    def variables(self) -> Tuple[Variable, ...]:
        return tuple(self._variables.values())

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self._variables)

    @property
    def arcs(self) -> List[Arc]:
        return list(self._arcs)

    def variable(self, node: NodeRef) -> Variable:
        name = node_name(node)
        if name not in self._variables:
            raise UnknownNode(name)
        return self._variables[name]

    def __contains__(self, node) -> bool:
        return node_name(node) in self._variables

    def has_arc(self, source: NodeRef, target: NodeRef) -> bool:
        return self._graph.has_edge(node_name(source), node_name(target))

    def parents(self, node: NodeRef) -> List[str]:
        """Parents in arc declaration order."""
        return list(self._graph.predecessors(self.variable(node).name))

    def children(self, node: NodeRef) -> List[str]:
        return list(self._graph.successors(self.variable(node).name))

    def descendants(self, node: NodeRef) -> Set[str]:
        return set(nx.descendants(self._graph, self.variable(node).name))

    def ancestors(self, node: NodeRef) -> Set[str]:
        return set(nx.ancestors(self._graph, self.variable(node).name))

    def topological_order(self) -> List[str]:
        return list(nx.lexicographical_topological_sort(self._graph, key=self._declared.__getitem__))

    def without_arcs(self, removed: Iterable[Arc]) -> 'CausalGraph':
        removed = set(removed)
        return CausalGraph(self.variables, [arc for arc in self._arcs if arc not in removed])

    def __eq__(self, other):
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return self.variables == other.variables and self._arcs == other._arcs

    __hash__ = None

    def __repr__(self):
        return f"CausalGraph(nodes={list(self.names)}, arcs={self._arcs})"


class Cpt:
    """
    Conditional probability table P(child | parents).

    The table has shape (|dom P1|, ..., |dom Pk|, |dom child|): one probability
    vector per element of the Cartesian product of parent domains.
    """

    def __init__(self, child: Variable, parents: Sequence[Variable], table):
        self.child = child
        self.parents = tuple(parents)
        names = [parent.name for parent in self.parents]
        if len(set(names)) != len(names) or child.name in names:
            raise CptShapeMismatch(child.name, f"repeated parent in {names}")

        table = np.array(table, dtype=float)
        expected = tuple(parent.cardinality for parent in self.parents) + (child.cardinality,)
        if table.shape != expected:
            raise CptShapeMismatch(child.name, f"table shape {table.shape}, expected {expected}")
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise InvalidCpt(f"{child.name}: negative or non-finite probability")

        sums = np.asarray(table.sum(axis=-1))
        bad = np.abs(sums - 1.0) > Config.CPT_TOLERANCE
        if np.any(bad):
            index = tuple(np.argwhere(bad)[0])
            labels = tuple(parent.domain[i] for parent, i in zip(self.parents, index))
            raise InvalidCpt(f"{child.name}: row {labels} sums to {float(sums[index])!r}")
        # rows within tolerance are renormalized; rows already within a few ulps are kept as given
        drifted = np.abs(sums - 1.0) > 8 * np.finfo(float).eps
        table = np.where(drifted[..., np.newaxis], table / sums[..., np.newaxis], table)
        table.flags.writeable = False
        self.table = table

    @classmethod
    def from_rows(cls, child: Variable, parents: Sequence[Variable],
                  rows: Mapping[Tuple[str, ...], Sequence[float]]) -> 'Cpt':
        """Build from {parent label tuple: probability vector over the child's domain}."""
        parents = tuple(parents)
        shape = tuple(parent.cardinality for parent in parents) + (child.cardinality,)
        table = np.full(shape, np.nan)
        for key, probabilities in rows.items():
            key = (key,) if isinstance(key, str) else tuple(key)
            if len(key) != len(parents):
                raise CptShapeMismatch(child.name, f"row key {key} does not match parents {[p.name for p in parents]}")
            if len(probabilities) != child.cardinality:
                raise CptShapeMismatch(child.name, f"row {key} has {len(probabilities)} entries")
            index = tuple(parent.index(label) for parent, label in zip(parents, key))
            table[index] = probabilities
        missing = np.isnan(table).any(axis=-1)
        if np.any(missing):
            index = tuple(np.argwhere(missing)[0])
            labels = tuple(parent.domain[i] for parent, i in zip(parents, index))
            raise CptShapeMismatch(child.name, f"no row for parent values {labels}")
        return cls(child, parents, table)

    @property
    def parent_names(self) -> Tuple[str, ...]:
        return tuple(parent.name for parent in self.parents)

    def row(self, parent_values: Sequence[str]) -> np.ndarray:
        if len(parent_values) != len(self.parents):
            raise InvalidAssignment(f"{self.child.name}: expected {len(self.parents)} parent values")
        index = tuple(parent.index(label) for parent, label in zip(self.parents, parent_values))
        return self.table[index]

    def probability(self, value: str, parent_values: Sequence[str] = ()) -> float:
        return float(self.row(parent_values)[self.child.index(value)])

    def rows(self) -> Iterator[Tuple[Tuple[str, ...], np.ndarray]]:
        """Rows in C order of the parent domains."""
        for labels in itertools.product(*(parent.domain for parent in self.parents)):
            yield labels, self.row(labels)

    def reorder(self, parent_names: Sequence[str]) -> 'Cpt':
        """Same table with parent axes permuted to the given order."""
        current = self.parent_names
        permutation = [current.index(name) for name in parent_names]
        table = np.transpose(self.table, permutation + [len(current)])
        return Cpt(self.child, [self.parents[i] for i in permutation], table)

    def __eq__(self, other):
        if not isinstance(other, Cpt):
            return NotImplemented
        return (self.child == other.child and self.parents == other.parents
                and np.array_equal(self.table, other.table))

    __hash__ = None

    def __repr__(self):
        return f"Cpt({self.child.name} | {', '.join(self.parent_names)})"


class CausalModel:
    """
    A causal graph plus one CPT per node. Immutable once built; construct
    with build_model().
    """

    def __init__(self, graph: CausalGraph, cpts: Mapping[str, Cpt]):
        self.graph = graph
        self._cpts = MappingProxyType({name: cpts[name] for name in graph.names})
        self._columns = {name: position for position, name in enumerate(graph.names)}

    @property
    def cpts(self) -> Mapping[str, Cpt]:
        return self._cpts

    @property
    def variables(self) -> Tuple[Variable, ...]:
        return self.graph.variables

    @property
    def names(self) -> Tuple[str, ...]:
        return self.graph.names

    def cpt(self, node: NodeRef) -> Cpt:
        return self._cpts[self.graph.variable(node).name]

    def variable(self, node: NodeRef) -> Variable:
        return self.graph.variable(node)

    def parents(self, node: NodeRef) -> List[str]:
        return self.graph.parents(node)

    def children(self, node: NodeRef) -> List[str]:
        return self.graph.children(node)

    def descendants(self, node: NodeRef) -> Set[str]:
        return self.graph.descendants(node)

    def ancestors(self, node: NodeRef) -> Set[str]:
        return self.graph.ancestors(node)

    def topological_order(self) -> List[str]:
        return self.graph.topological_order()

    def column(self, node: NodeRef) -> int:
        """Column of a node in state_table (declaration order)."""
        return self._columns[self.graph.variable(node).name]

    def encode(self, assignment: Mapping[str, str]) -> Dict[str, int]:
        """Validate an assignment and map labels to domain indices."""
        return {name: self.variable(name).index(label) for name, label in assignment.items()}

    @cached_property
    def state_table(self) -> np.ndarray:
        """Every joint state as a row of domain indices, columns in declaration order."""
        cards = [variable.cardinality for variable in self.graph.variables]
        total = int(np.prod(cards))
        if total > Config.MAX_JOINT_STATES:
            raise EnumerationTooLarge(total, Config.MAX_JOINT_STATES)
        states = np.indices(cards).reshape(len(cards), -1).T
        states.flags.writeable = False
        return states

    def with_cpt(self, cpt: Cpt) -> 'CausalModel':
        """Copy of the model with one CPT replaced; all other CPTs are shared."""
        cpts = dict(self._cpts)
        name = cpt.child.name
        if name not in cpts:
            raise UnknownNode(name)
        cpts[name] = cpt
        return build_model(self.graph, cpts.values())

    def with_graph(self, graph: CausalGraph, replacements: Iterable[Cpt] = ()) -> 'CausalModel':
        """
        Model on a new arc set over the same variables. Nodes whose parents
        changed need a CPT in replacements; the rest keep theirs.
        """
        if graph.variables != self.graph.variables:
            raise InvalidVariable("with_graph needs the same variables")
        cpts = dict(self._cpts)
        for cpt in replacements:
            cpts[cpt.child.name] = cpt
        return build_model(graph, cpts.values())

    def __eq__(self, other):
        if not isinstance(other, CausalModel):
            return NotImplemented
        return self.graph == other.graph and dict(self._cpts) == dict(other._cpts)

    __hash__ = None

    def __repr__(self):
        return f"CausalModel({self.graph!r})"


def build_model(graph: CausalGraph, cpts: Iterable[Cpt]) -> CausalModel:
    """
    Validate CPTs against the graph and assemble a model.

    A CPT whose parents are a permutation of the graph parents is transposed
    into graph order.
    """
    given: Dict[str, Cpt] = {}
    for cpt in cpts:
        name = cpt.child.name
        if name not in graph:
            raise UnknownNode(name)
        if name in given:
            raise CptShapeMismatch(name, "more than one CPT given")
        given[name] = cpt

    ordered: Dict[str, Cpt] = {}
    for variable in graph.variables:
        cpt = given.get(variable.name)
        if cpt is None:
            raise MissingCpt(variable.name)
        if cpt.child != variable:
            raise CptShapeMismatch(variable.name, f"child domain {cpt.child.domain}, graph has {variable.domain}")
        expected = graph.parents(variable.name)
        actual = cpt.parent_names
        if sorted(actual) != sorted(expected):
            raise CptShapeMismatch(variable.name, f"parents {list(actual)}, graph has {expected}")
        for parent in cpt.parents:
            if parent != graph.variable(parent.name):
                raise CptShapeMismatch(variable.name, f"parent {parent.name} has domain {parent.domain}")
        if list(actual) != expected:
            cpt = cpt.reorder(expected)
        ordered[variable.name] = cpt

    model = CausalModel(graph, ordered)
    logger.debug(f"Built model with {len(graph.names)} nodes and {len(graph.arcs)} arcs")
    return model


def descendants(model: CausalModel, node: NodeRef) -> Set[str]:
    """De(node), excluding the node itself."""
    return model.descendants(node)


def topological_order(model: CausalModel) -> List[str]:
    """Nodes ordered so that every arc points forward; ties follow declaration order."""
    return model.topological_order()
