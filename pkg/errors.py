"""
Exception hierarchy shared by every FairPath module.
"""
from typing import Dict, Iterable, Optional


class FairPathError(ValueError):
    """Base class for all FairPath errors."""


# Model construction

class CycleDetected(FairPathError):
    """The arc set contains a directed cycle (self-loops included)."""

    def __init__(self, cycle: Iterable = ()):
        self.cycle = list(cycle)
        super().__init__(f"Graph is not acyclic: {self.cycle}" if self.cycle else "Graph is not acyclic")


class UnknownNode(FairPathError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"Unknown node: {node}")


class DuplicateArc(FairPathError):
    def __init__(self, source: str, target: str):
        self.arc = (source, target)
        super().__init__(f"Duplicate arc: {source} -> {target}")


class InvalidVariable(FairPathError):
    """Bad variable name or domain."""


class MissingCpt(FairPathError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"No CPT given for node {node}")


class CptShapeMismatch(FairPathError):
    def __init__(self, node: str, detail: str = ''):
        self.node = node
        message = f"CPT of {node} disagrees with the graph"
        super().__init__(f"{message}: {detail}" if detail else message)


class InvalidCpt(FairPathError):
    """Negative entries or a row that does not sum to one."""


class InvalidAssignment(FairPathError):
    """Value outside a domain, unknown variable, or overlapping event/evidence."""


class ModelFormatError(FairPathError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


# Inference

class EnumerationTooLarge(FairPathError):
    def __init__(self, states: int, limit: int):
        self.states = states
        super().__init__(f"Joint state space has {states} states (limit {limit})")


class ZeroConditioningEvent(FairPathError):
    """The conditioning event has probability zero."""


# Path-specific effects

class InvalidQuery(FairPathError):
    """A path query that does not fit the model."""


class Unidentifiable(FairPathError):
    """The recanting witness criterion holds; the effect cannot be computed."""

    def __init__(self, witnesses: Iterable[str]):
        self.witnesses = frozenset(witnesses)
        super().__init__(f"Recanting witness criterion satisfied, witnesses: {sorted(self.witnesses)}")


class NotApplicable(FairPathError):
    """Graph surgery requested on a model without witnesses."""


class SolverFailure(FairPathError):
    def __init__(self, message: str, diagnostics: Optional[Dict] = None):
        self.diagnostics = dict(diagnostics or {})
        details = ', '.join(f"{key}={value}" for key, value in self.diagnostics.items())
        super().__init__(f"{message} ({details})" if details else message)


# Data

class SchemaMismatch(FairPathError):
    """Columns of a data file do not match the declared variables."""


class OutOfDomainValue(FairPathError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column {column}: value {value!r} is not in the domain")


class EmptyDataset(FairPathError):
    """A data file holds no rows."""


class DegenerateBaseline(FairPathError):
    """The baseline contingency table has no positive expected cell."""


class ReportFormatError(FairPathError):
    def __init__(self, message: str):
        super().__init__(f"Malformed report: {message}")
