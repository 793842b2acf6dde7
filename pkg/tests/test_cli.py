"""Tests for the command-line front end"""
import json

import pytest
from click.testing import CliRunner

from wedgebound.analysis import verification
from wedgebound.cli import cli
from wedgebound.core.errors import QuadratureError


@pytest.fixture
def runner():
    return CliRunner()


def write_run_file(tmp_path, text):
    path = tmp_path / 'run.env'
    path.write_text(text)
    return path


def test_version(runner):
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0


def test_config_check(runner, tmp_path):
    path = write_run_file(tmp_path, 'model.n=4\nquad.level=2\n')
    result = runner.invoke(cli, ['config-check', '--config', str(path)])
    assert result.exit_code == 0
    assert 'model.n' in result.output


def test_unknown_key_is_usage_error(runner, tmp_path):
    path = write_run_file(tmp_path, 'model.colour=red\n')
    result = runner.invoke(cli, ['axioms', '--config', str(path), '--out', str(tmp_path / 'out')])
    assert result.exit_code == 2


def test_axioms_pass(runner, tmp_path):
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['axioms', '--n', '3', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert (out / 'axioms.csv').exists()
    assert json.loads((out / 'axioms.json').read_text())['summary']['passed'] is True


def test_axioms_csv_is_deterministic(runner, tmp_path):
    first, second = tmp_path / 'a', tmp_path / 'b'
    runner.invoke(cli, ['axioms', '--n', '4', '--out', str(first)])
    runner.invoke(cli, ['axioms', '--n', '4', '--out', str(second)])
    assert (first / 'axioms.csv').read_bytes() == (second / 'axioms.csv').read_bytes()
    assert (first / 'poles.csv').read_bytes() == (second / 'poles.csv').read_bytes()


def test_perturbed_axioms_fail(runner, tmp_path):
    result = runner.invoke(cli, ['axioms', '--perturb-s', '1e-3', '--out', str(tmp_path / 'out')])
    assert result.exit_code == 1


def test_fusion_without_bound_states(runner, tmp_path):
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['fusion', '--n', '2', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert (out / 'fusion.csv').read_text().startswith('N,alpha,beta,gamma')


def test_fusion_zero_eta(runner, tmp_path):
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['fusion', '--n', '3', '--zero-eta', '--out', str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads((out / 'fusion.json').read_text())
    assert [p['eta_im'] for p in data['processes']] == [0.0, 0.0]


def test_fusion_reports_quadrature_failure(runner, tmp_path, monkeypatch):
    def calibrate(*args, **kwargs):
        raise QuadratureError("radial on-shell transform not converged", 1e-4)

    monkeypatch.setattr(verification, 'calibrate_eta', calibrate)
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['fusion', '--n', '3', '--out', str(out)])
    assert result.exit_code == 1
    data = json.loads((out / 'fusion.json').read_text())
    assert data['error'].startswith('QuadratureError')


def test_empty_custom_scenario(runner, tmp_path):
    path = write_run_file(tmp_path, 'scenario=custom\n')
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['weak-commutator', '--config', str(path), '--out', str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads((out / 'weak_commutator.json').read_text())
    assert data['requests'] == [] and data['passed'] is True


@pytest.mark.slow
def test_fusion_calibrates(runner, tmp_path):
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['fusion', '--n', '3', '--out', str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads((out / 'fusion.json').read_text())
    assert all(abs(e['ratio'] - 1.0) < 1e-3 for e in data['eta'])


@pytest.mark.slow
def test_weak_commutator_passes(runner, tmp_path):
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['weak-commutator', '--n', '3', '--workers', '2', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert (out / 'convergence.csv').exists()


@pytest.mark.slow
def test_weak_commutator_fails_without_eta(runner, tmp_path):
    result = runner.invoke(cli, ['weak-commutator', '--n', '3', '--zero-eta', '--out', str(tmp_path / 'out')])
    assert result.exit_code == 1
