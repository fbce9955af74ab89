"""
Evaluation metrics.
Data utility (chi-square between datasets), dataset-level risk difference and
the prediction audit for a repaired model.
"""
import logging
from dataclasses import dataclass, fields
from typing import Dict, Optional

import numpy as np
from scipy.stats import chisquare

from causal_model import CausalModel, Cpt, Designation, NodeRef, node_name
from dataset import Dataset, estimate_cpts
from discovery import DiscoveryReport, pse_dd
from errors import DegenerateBaseline, EmptyDataset, SchemaMismatch, ZeroConditioningEvent
from path_effects import PathQuery
from removal import RepairResult

logger = logging.getLogger(__name__)


def chi_square_utility(original: Dataset, modified: Dataset) -> float:
    """
    Chi-square of the modified dataset's joint-state counts against the
    original's, with expected counts scaled to the modified total.

    Joint states that never occur in the original are pooled into the cell
    with the smallest positive expected count.
    """
    if original.variables != modified.variables:
        raise SchemaMismatch(f"Datasets disagree on columns: {original.names} vs {modified.names}")

    if len(original) == 0:
        raise DegenerateBaseline("Original dataset is empty")
    baseline = original.counts()
    observed_counts = modified.counts()
    cells = baseline.index.union(observed_counts.index)
    observed = observed_counts.reindex(cells, fill_value=0).to_numpy(dtype=float)
    expected = baseline.reindex(cells, fill_value=0).to_numpy(dtype=float) * (len(modified) / len(original))

    zero = expected <= 0
    if np.all(zero):
        raise DegenerateBaseline("Original dataset has no positive expected cell")
    if np.any(zero):
        target = int(np.argmin(np.where(zero, np.inf, expected)))
        observed[target] += observed[zero].sum()
        logger.warning(f"Pooled {int(zero.sum())} zero-expected cells into one cell")
        observed, expected = observed[~zero], expected[~zero]

    statistic = float(chisquare(observed, expected).statistic)
    logger.info(f"Chi-square utility over {len(expected)} cells: {statistic:.4f}")
    return statistic


def dataset_risk_difference(dataset: Dataset, protected: Designation, decision: Designation) -> float:
    """Empirical P(e+ | c+) - P(e+ | c-)."""
    frame = dataset.frame
    for designation in (protected, decision):
        variable = dataset.variable(designation.variable)
        variable.index(designation.negative)
        variable.index(designation.positive)

    rates = []
    for label in (protected.positive, protected.negative):
        group = frame[frame[protected.variable] == label]
        if group.empty:
            raise ZeroConditioningEvent(f"No rows with {protected.variable}={label}")
        rates.append(float((group[decision.variable] == decision.positive).mean()))
    return rates[0] - rates[1]


def bayes_point_model(model: CausalModel, decision: NodeRef) -> CausalModel:
    """Model whose decision CPT is the one-hot argmax of the original (ties go to the first label)."""
    cpt = model.cpt(decision)
    winners = np.argmax(cpt.table, axis=-1)
    table = np.zeros_like(cpt.table)
    np.put_along_axis(table, winners[..., np.newaxis], 1.0, axis=-1)
    return model.with_cpt(Cpt(cpt.child, cpt.parents, table))


def predict_labels(model: CausalModel, dataset: Dataset, decision: NodeRef) -> np.ndarray:
    """argmax_e P(e | parent values of each row)."""
    name = node_name(decision)
    cpt = model.cpt(name)
    codes = dataset.codes()
    column = {variable: position for position, variable in enumerate(dataset.names)}
    rows = cpt.table[tuple(codes[:, column[parent]] for parent in cpt.parent_names)]
    winners = np.argmax(np.atleast_2d(rows), axis=-1)
    if winners.shape[0] != len(dataset):
        winners = np.broadcast_to(winners, (len(dataset),))
    return np.asarray(cpt.child.domain)[winners]


@dataclass(frozen=True)
class AuditReport(DiscoveryReport):
    """Discovery report on the predictions plus their accuracy on the recorded decisions."""
    accuracy: float = float('nan')
    test_rows: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {**super().to_dict(), 'accuracy': self.accuracy, 'test_rows': self.test_rows}


def prediction_accuracy(labels: np.ndarray, test: Dataset, decision: NodeRef) -> float:
    """Share of rows whose predicted label matches the recorded decision."""
    if len(test) == 0:
        raise EmptyDataset("No test rows to score")
    recorded = test.frame[node_name(decision)].to_numpy()
    return float(np.mean(np.asarray(labels) == recorded))


def audit_predictions(model: CausalModel, test: Dataset, direct: PathQuery, indirect: PathQuery,
                      tau: Optional[float] = None, alpha: Optional[float] = None) -> AuditReport:
    """
    Relabel the decision column with the model's argmax predictions, estimate
    a model on the same graph and run discovery on it.

    The decision CPT of the audited model is the predictor itself: on parent
    configurations present in the test data it equals the unsmoothed
    estimate, elsewhere it gives the predictor's own output.
    """
    if len(test) == 0:
        raise EmptyDataset("No test rows to audit")
    decision = direct.decision.variable
    labels = predict_labels(model, test, decision)
    accuracy = prediction_accuracy(labels, test, decision)
    relabeled = test.with_column(decision, labels)
    estimated = estimate_cpts(relabeled, model.graph, alpha)
    audited = estimated.with_cpt(bayes_point_model(model, decision).cpt(decision))
    positive = float(np.mean(labels == direct.decision.positive))
    logger.info(f"Audit: {len(test)} test rows, {positive:.1%} predicted {direct.decision.positive}, "
                f"accuracy {accuracy:.1%}")
    report = pse_dd(audited, direct, indirect, tau)
    return AuditReport(**{item.name: getattr(report, item.name) for item in fields(DiscoveryReport)},
                       accuracy=accuracy, test_rows=len(test))


def predict_and_audit(repaired: RepairResult, test: Dataset, tau: Optional[float] = None,
                      alpha: Optional[float] = None) -> AuditReport:
    """Audit the predictions of a repaired model on held-out data."""
    tau = repaired.tau if tau is None else tau
    return audit_predictions(repaired.repaired_model, test, repaired.direct, repaired.indirect, tau, alpha)
