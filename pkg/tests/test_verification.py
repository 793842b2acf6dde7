"""Tests for the verification suites behind the CLI"""
import pytest

from wedgebound.analysis import verification
from wedgebound.analysis.verification import VerificationRunner
from wedgebound.core.config import RunConfig
from wedgebound.core.errors import CalibrationFailure, QuadratureError


def failing_calibration(error):
    def calibrate(*args, **kwargs):
        raise error
    return calibrate


def test_fusion_without_bound_states():
    suite = VerificationRunner(RunConfig.from_mapping({'model.n': '2'})).run_fusion()
    assert suite.passed
    assert len(suite.table) == 0


def test_fusion_zero_eta_skips_fit():
    suite = VerificationRunner(RunConfig.from_mapping({'model.n': '3', 'debug.zero_eta': 'true'})).run_fusion()
    assert not suite.error
    assert [p.eta for p in suite.table] == [0, 0]
    assert all(r.passed for r in suite.pole_checks)


@pytest.mark.parametrize('error', [
    QuadratureError("radial on-shell transform not converged", 1e-4),
    CalibrationFailure("residual above tolerance", [0.1]),
])
def test_fusion_records_errors(monkeypatch, error):
    monkeypatch.setattr(verification, 'calibrate_eta', failing_calibration(error))
    suite = VerificationRunner(RunConfig()).run_fusion()
    assert suite.error.startswith(type(error).__name__)
    assert not suite.passed
    assert all(p.eta == 0 for p in suite.table)
    assert suite.pole_checks


def test_weak_commutator_reports_fusion_error(monkeypatch):
    error = QuadratureError("Hermite inner product did not converge", 1e-3)
    monkeypatch.setattr(verification, 'calibrate_eta', failing_calibration(error))
    suite = VerificationRunner(RunConfig()).run_weak_commutator()
    assert suite.error.startswith('QuadratureError')
    assert not suite.complete and not suite.passed
    assert suite.reports == []


@pytest.mark.slow
def test_weak_commutator_uses_fusion_table():
    runner = VerificationRunner(RunConfig())
    fusion = runner.run_fusion()
    assert fusion.passed, fusion.error
    suite = runner.run_weak_commutator()
    assert suite.calibration == fusion.table.calibration.to_dict()
