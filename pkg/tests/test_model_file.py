import pytest

from errors import CycleDetected, ModelFormatError
from model_file import format_model, parse_model_text, read_model_file, write_model_file
from toy_models import mediator_case, random_case

GRAPH_ONLY = """
# loan graph
var Race c-,c+
var Loan e-,e+
arc Race Loan
"""


def test_round_trip(tmp_path, loan, witness):
    for case in (loan, witness, mediator_case(), random_case(3)):
        path = tmp_path / 'model.txt'
        write_model_file(case.model, path)
        graph, model = read_model_file(path)
        assert graph == case.model.graph
        assert model == case.model


def test_graph_only_text():
    graph, model = parse_model_text(GRAPH_ONLY)
    assert model is None
    assert graph.names == ('Race', 'Loan')
    assert graph.has_arc('Race', 'Loan')


def test_format_graph_only(loan):
    text = format_model(loan.model.graph)
    assert 'cpt' not in text
    graph, model = parse_model_text(text)
    assert model is None and graph == loan.model.graph


def test_unknown_keyword_reports_line():
    with pytest.raises(ModelFormatError) as info:
        parse_model_text("var A a0,a1\nnode B\n")
    assert info.value.line_number == 2


def test_bad_probability_reports_line():
    text = GRAPH_ONLY + "cpt Race | : 0.5,half\n"
    with pytest.raises(ModelFormatError) as info:
        parse_model_text(text)
    assert info.value.line_number == 6


def test_duplicate_cpt_row():
    text = GRAPH_ONLY + "cpt Race | : 0.5,0.5\ncpt Race | : 0.5,0.5\n"
    with pytest.raises(ModelFormatError) as info:
        parse_model_text(text)
    assert info.value.line_number == 7


def test_bad_label_is_format_error():
    with pytest.raises(ModelFormatError) as info:
        parse_model_text("var A a0,a0\n")
    assert info.value.line_number == 1


def test_missing_row_is_format_error():
    text = GRAPH_ONLY + "cpt Race | : 0.5,0.5\ncpt Loan | c- : 0.7,0.3\n"
    with pytest.raises(ModelFormatError) as info:
        parse_model_text(text)
    assert info.value.line_number == 7


def test_cycle_in_file():
    with pytest.raises(CycleDetected):
        parse_model_text("var A a0,a1\nvar B b0,b1\narc A B\narc B A\n")
