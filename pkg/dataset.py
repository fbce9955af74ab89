"""
Tabular datasets over a causal model's variables.
Handles CSV input/output, CPT estimation, dataset generation and splitting.
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.model_selection import train_test_split

from causal_model import CausalGraph, CausalModel, Cpt, Variable, build_model
from config import Config
from errors import EmptyDataset, OutOfDomainValue, SchemaMismatch
from inference import joint_distribution

logger = logging.getLogger(__name__)

COUNT_COLUMN = '__count'
SAMPLING_METHODS = ('ancestral', 'expected')


class Dataset:
    """
    Rows of category labels, one column per variable in schema order.
    Every value is checked against its variable's domain.
    """

    def __init__(self, variables: Sequence[Variable], frame: pd.DataFrame):
        self.variables = tuple(variables)
        names = [variable.name for variable in self.variables]
        missing = [name for name in names if name not in frame.columns]
        extra = [column for column in frame.columns if column not in names]
        if missing or extra:
            raise SchemaMismatch(f"missing columns {missing}, unexpected columns {extra}")

        frame = frame[names].reset_index(drop=True).astype(str)
        for variable in self.variables:
            column = frame[variable.name]
            bad = ~column.isin(variable.domain)
            if bad.any():
                row = int(np.flatnonzero(bad.to_numpy())[0])
                raise OutOfDomainValue(row + 1, variable.name, column.iloc[row])
        self.frame = frame

    @property
    def names(self) -> List[str]:
        return [variable.name for variable in self.variables]

    def __len__(self) -> int:
        return len(self.frame)

    def variable(self, name: str) -> Variable:
        for variable in self.variables:
            if variable.name == name:
                return variable
        raise SchemaMismatch(f"No column {name}")

    def codes(self) -> np.ndarray:
        """(rows, variables) array of domain indices."""
        columns = [
            pd.Categorical(self.frame[variable.name], categories=variable.domain).codes
            for variable in self.variables
        ]
        return np.column_stack(columns).astype(np.int64) if columns else np.empty((len(self), 0), dtype=np.int64)

    def counts(self) -> pd.Series:
        """Count per observed joint state, indexed by label tuples."""
        return self.frame.value_counts(sort=False)

    def with_column(self, name: str, labels: Sequence[str]) -> 'Dataset':
        """Copy with one column replaced."""
        frame = self.frame.copy()
        frame[name] = list(labels)
        return Dataset(self.variables, frame)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.variables == other.variables and self.frame.equals(other.frame)

    __hash__ = None

    def __repr__(self):
        return f"Dataset(rows={len(self)}, columns={self.names})"


def load_csv(path: Union[str, Path], schema: Sequence[Variable]) -> Dataset:
    """
    Load a CSV whose header names the schema's variables (any order).

    An optional __count column holds pre-aggregated counts; each row is
    repeated that many times.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise EmptyDataset(f"{path} is empty") from None
    frame.columns = [column.strip() for column in frame.columns]

    if COUNT_COLUMN in frame.columns:
        raw = frame.pop(COUNT_COLUMN)
        counts = pd.to_numeric(raw, errors='coerce')
        bad = counts.isna() | (counts < 0) | (counts != counts.round())
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise OutOfDomainValue(row + 1, COUNT_COLUMN, raw.iloc[row])
        frame = frame.loc[frame.index.repeat(counts.astype(int))]

    if frame.empty:
        raise EmptyDataset(f"{path} holds no rows")
    dataset = Dataset(schema, frame)
    logger.info(f"Loaded {len(dataset)} rows from {path}")
    return dataset


def write_csv(dataset: Dataset, path: Union[str, Path]):
    """Write header plus one line per row, no index."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(dataset)} rows to {path}")


def estimate_cpts(dataset: Dataset, graph: CausalGraph, alpha: Optional[float] = None) -> CausalModel:
    """
    Estimate every CPT of the graph from counts.

    Each row is (count + alpha) / (total + alpha * |domain|). With alpha = 0 a
    parent configuration that never occurs gets a uniform row.
    """
    alpha = Config.SMOOTHING_ALPHA if alpha is None else alpha
    if not alpha >= 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    for variable in graph.variables:
        if dataset.variable(variable.name) != variable:
            raise SchemaMismatch(f"{variable.name}: dataset domain differs from the graph")

    codes = dataset.codes()
    column = {name: position for position, name in enumerate(dataset.names)}
    cpts = []
    for variable in graph.variables:
        parents = [graph.variable(parent) for parent in graph.parents(variable.name)]
        shape = tuple(parent.cardinality for parent in parents) + (variable.cardinality,)
        cells = np.ravel_multi_index(
            tuple(codes[:, column[node.name]] for node in parents + [variable]), shape)
        table = np.bincount(cells, minlength=int(np.prod(shape))).reshape(shape).astype(float) + alpha
        totals = table.sum(axis=-1, keepdims=True)
        unseen = totals[..., 0] == 0
        if np.any(unseen):
            logger.warning(f"{variable.name}: {int(unseen.sum())} unseen parent configurations, using uniform rows")
        table = np.where(totals > 0, table / np.where(totals > 0, totals, 1.0), 1.0 / variable.cardinality)
        cpts.append(Cpt(variable, parents, table))

    model = build_model(graph, cpts)
    logger.info(f"Estimated {len(cpts)} CPTs from {len(dataset)} rows (alpha={alpha})")
    return model


def _frame_from_codes(model: CausalModel, codes: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({
        variable.name: np.asarray(variable.domain)[codes[:, position]]
        for position, variable in enumerate(model.variables)
    })


def _largest_remainder(expected: np.ndarray, n: int) -> np.ndarray:
    counts = np.floor(expected).astype(np.int64)
    shortfall = n - int(counts.sum())
    if shortfall > 0:
        order = np.argsort(-(expected - counts), kind='stable')
        counts[order[:shortfall]] += 1
    return counts


def sample_dataset(model: CausalModel, n: int, seed: Optional[int] = None,
                   method: str = 'ancestral') -> Dataset:
    """
    Generate n rows from the model's joint distribution.

    Args:
        method: 'ancestral' draws each node in topological order given its
            sampled parents; 'expected' rounds n * P(v) with largest
            remainders and shuffles the rows
    """
    if n < 1:
        raise EmptyDataset(f"Cannot generate {n} rows")
    if method not in SAMPLING_METHODS:
        raise ValueError(f"Unknown sampling method {method!r}, expected one of {SAMPLING_METHODS}")
    seed = Config.SEED if seed is None else seed
    rng = np.random.default_rng(seed)

    if method == 'ancestral':
        codes = np.zeros((n, len(model.names)), dtype=np.int64)
        for name in model.topological_order():
            cpt = model.cpt(name)
            rows = cpt.table[tuple(codes[:, model.column(parent)] for parent in cpt.parent_names)]
            if rows.ndim == 1:
                rows = np.broadcast_to(rows, (n, len(rows)))
            draws = rng.random(n)
            picked = (np.cumsum(rows, axis=1) < draws[:, np.newaxis]).sum(axis=1)
            codes[:, model.column(name)] = np.minimum(picked, cpt.child.cardinality - 1)
    else:
        joint = joint_distribution(model)
        counts = _largest_remainder(n * joint / joint.sum(), n)
        codes = np.repeat(np.asarray(model.state_table), counts, axis=0)
        codes = codes[rng.permutation(n)]

    logger.info(f"Generated {n} rows ({method}, seed={seed})")
    return Dataset(model.variables, _frame_from_codes(model, codes))


def split_dataset(dataset: Dataset, test_fraction: float = 0.3,
                  seed: Optional[int] = None) -> Tuple[Dataset, Dataset]:
    """Seeded row split into (train, test)."""
    seed = Config.SEED if seed is None else seed
    train, test = train_test_split(dataset.frame, test_size=test_fraction, random_state=seed)
    return Dataset(dataset.variables, train), Dataset(dataset.variables, test)
