import logging

import pytest

from config import Config
from discovery import judge_effects
from exit_codes import ExitCodes
from logger import AlertSystem, print_summary, setup_logging
from toy_models import case_by_name, fixture_names


def test_defaults_validate():
    assert Config.validate()


def test_invalid_settings(monkeypatch):
    monkeypatch.setattr(Config, 'TAU', -0.1)
    with pytest.raises(ValueError):
        Config.validate()
    monkeypatch.setattr(Config, 'TAU', 0.05)
    monkeypatch.setattr(Config, 'SOLVER_ITERS', 0)
    with pytest.raises(ValueError):
        Config.validate()


@pytest.mark.parametrize('setting, value', [
    ('TAU', float('nan')), ('TAU', float('inf')), ('SMOOTHING_ALPHA', float('nan')),
])
def test_non_finite_settings(monkeypatch, setting, value):
    monkeypatch.setattr(Config, setting, value)
    with pytest.raises(ValueError):
        Config.validate()


def test_solver_iterations(monkeypatch):
    monkeypatch.delenv('FAIRPATH_SOLVER_ITERS', raising=False)
    assert Config.solver_iterations() == Config.SOLVER_ITERS
    monkeypatch.setenv('FAIRPATH_SOLVER_ITERS', '25')
    assert Config.solver_iterations() == 25
    monkeypatch.setenv('FAIRPATH_SOLVER_ITERS', '0')
    with pytest.raises(ValueError):
        Config.solver_iterations()


def test_setup_logging_does_not_stack_handlers(tmp_path):
    log_file = tmp_path / 'logs' / 'fairpath.log'
    root = setup_logging('DEBUG', str(log_file))
    setup_logging('DEBUG', str(log_file))
    marked = [handler for handler in root.handlers if getattr(handler, '_fairpath_handler', False)]
    assert len(marked) == 2
    assert root.level == logging.DEBUG
    logging.getLogger('fairpath.test').warning('written')
    for handler in marked:
        handler.flush()
    assert 'written' in log_file.read_text()
    setup_logging('not-a-level')
    assert root.level == logging.INFO


def test_print_summary(capsys):
    print_summary('TITLE', {'tau': 0.05, 'judge_direct': True})
    out = capsys.readouterr().out
    assert 'TITLE' in out
    assert 'tau:' in out and '0.050000' in out


def test_alert_levels(caplog):
    alerts = AlertSystem()
    with caplog.at_level(logging.INFO, logger='logger'):
        alerts.send_alert('info', 'hello')
    assert caplog.records[-1].getMessage() == 'ALERT: hello'
    with pytest.raises(ValueError):
        alerts.send_alert('LOUD', 'hello')


def test_exit_codes():
    assert ExitCodes.for_report(judge_effects((0.1, 0.0), None, 0.05)) == ExitCodes.DISCRIMINATION
    assert ExitCodes.for_report(judge_effects((0.0, 0.0), None, 0.05)) == ExitCodes.INDETERMINATE
    assert ExitCodes.for_report(judge_effects((0.0, 0.0), (0.0, 0.0), 0.05)) == ExitCodes.SUCCESS
    assert ExitCodes.get_description(ExitCodes.SOLVER_FAILURE).startswith('Repair')
    assert 'Unknown' in ExitCodes.get_description(42)


def test_fixtures_by_name():
    for name in fixture_names():
        case = case_by_name(name, seed=1)
        case.direct.validate(case.model)
    with pytest.raises(KeyError):
        case_by_name('nope')
