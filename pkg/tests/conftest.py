import logging

import pytest

from dataset import sample_dataset, write_csv
from model_file import write_model_file
from toy_models import (chain_model, fair_loan_case, loan_case, mediator_case, two_node_case,
                        witness_case)


@pytest.fixture
def loan():
    return loan_case()


@pytest.fixture
def fair_loan():
    return fair_loan_case()


@pytest.fixture
def witness():
    return witness_case()


@pytest.fixture
def mediator():
    return mediator_case()


@pytest.fixture
def two_node():
    return two_node_case()


@pytest.fixture
def chain():
    return chain_model()


@pytest.fixture
def write_case(tmp_path):
    """Write a fixture's model file and a seeded dataset; returns (model path, data path)."""
    def write(case, name='case', rows=2000, seed=0):
        model_path = tmp_path / f"{name}.txt"
        data_path = tmp_path / f"{name}.csv"
        write_model_file(case.model, model_path)
        write_csv(sample_dataset(case.model, rows, seed=seed), data_path)
        return model_path, data_path
    return write


@pytest.fixture(autouse=True)
def quiet_logging():
    logging.getLogger().setLevel(logging.WARNING)
    yield
