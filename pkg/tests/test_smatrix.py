"""Tests for S-matrix components, bootstrap construction and pole search"""
import cmath
import math

import mpmath
import numpy as np
import pytest

from wedgebound.core.errors import ContourConflict, DependencyMissing, InvalidParameter, PoleProximity
from wedgebound.core.smatrix import (
    SComponent, SMatrixModel, bootstrap_component, check_crossing, check_path_independence,
    check_symmetries, check_unitarity, export_pole_rows, locate_poles, residue_at, s11, strip_grid,
)


def ratio(x, zeta):
    return np.sinh(0.5 * (zeta + 1j * x)) / np.sinh(0.5 * (zeta - 1j * x))


GRID = np.array([-2.0, -0.4, 0.0, 0.7, 1.9]) + 0.37j


class TestSeed:

    def test_s11_against_mpmath(self):
        mpmath.mp.dps = 30
        for N in (3, 4, 7):
            for zeta in (0.4 + 0.2j, -1.3 + 1.1j, 2.2 + 0.05j):
                z = mpmath.mpc(zeta.real, zeta.imag)
                x = 2 * mpmath.pi / N
                expected = mpmath.sinh((z + 1j * x) / 2) / mpmath.sinh((z - 1j * x) / 2)
                assert abs(s11(N, zeta) - complex(expected)) < 1e-12

    def test_model_seed_matches_closed_form(self, model3):
        assert np.allclose(model3.evaluate(1, 1, GRID), s11(3, GRID), rtol=1e-12, atol=0)

    def test_n_must_be_at_least_two(self):
        with pytest.raises(InvalidParameter):
            SMatrixModel(1)

    def test_ising_constant(self):
        model = SMatrixModel(2)
        assert model.component(1, 1)(0.3) == pytest.approx(-1.0)
        assert model.component(1, 1).poles == ()


class TestBootstrap:

    def test_n3_components(self, model3):
        assert np.allclose(model3.evaluate(1, 2, GRID), -ratio(math.pi / 3, GRID), rtol=1e-12)
        assert np.allclose(model3.evaluate(2, 2, GRID), model3.evaluate(1, 1, GRID), rtol=1e-12)

    def test_n4_components(self, model4):
        expected = ratio(3 * math.pi / 4, GRID) * ratio(math.pi / 4, GRID)
        assert np.allclose(model4.evaluate(1, 2, GRID), expected, rtol=1e-12)
        assert np.allclose(model4.evaluate(1, 3, GRID), -ratio(math.pi / 2, GRID), rtol=1e-12)

    def test_zero_shift_is_plain_product(self, model3):
        product = bootstrap_component(model3, 1, (1, 1, 2), shifts=(0.0, 0.0))
        assert np.allclose(product(GRID), model3.evaluate(1, 1, GRID) ** 2, rtol=1e-12)

    def test_missing_dependency(self):
        model = SMatrixModel(4, build=False)
        with pytest.raises(DependencyMissing):
            bootstrap_component(model, 1, (1, 1, 2))
        with pytest.raises(DependencyMissing):
            model.component(1, 1)

    def test_factors_cancel(self):
        c = SComponent.from_factors(1, 1, 3, [0.5, 1.0], [0.5, -1.0])
        assert c.numerator == (1.0,)
        assert c.denominator == (-1.0,)

    def test_pole_proximity(self, model3):
        with pytest.raises(PoleProximity) as info:
            model3.evaluate(1, 1, complex(0, 2 * math.pi / 3))
        assert info.value.pole == pytest.approx(complex(0, 2 * math.pi / 3))


class TestAxioms:

    @pytest.mark.parametrize('N', [3, 4, 5])
    def test_all_checks_pass(self, N):
        model = SMatrixModel(N)
        for c in model.components.values():
            assert check_unitarity(c).passed
        for alpha in model.types:
            for beta in model.types:
                assert check_crossing(model, alpha, beta).passed
        assert all(r.passed for r in check_path_independence(model))
        assert all(r.passed for r in check_symmetries(model))

    @pytest.mark.parametrize('N', range(11, 16))
    def test_large_n_builds(self, N):
        model = SMatrixModel(N)
        assert len(model.components) == (N - 1) ** 2
        locations = [p.location for p in model.component(1, 1).poles]
        assert min(abs(z - complex(0, 2 * math.pi / N)) for z in locations) < 1e-12
        assert check_unitarity(model.component(N // 2, N - 2)).passed

    @pytest.mark.parametrize('N', [3, 5, 7])
    def test_crossing_at_self_dual_point(self, N):
        model = SMatrixModel(N)
        zeta = np.array([0.5j * math.pi])
        for alpha in model.types:
            for beta in model.types:
                assert check_crossing(model, alpha, beta, grid=zeta).passed
                crossed = model.evaluate(model.antiparticle(beta), alpha, zeta)
                assert np.allclose(model.evaluate(alpha, beta, zeta), crossed, rtol=1e-12)

    def test_path_independence_has_alternatives(self, model4):
        reports = check_path_independence(model4)
        assert len(reports) > len(model4.components)

    def test_perturbation_breaks_unitarity(self):
        model = SMatrixModel(3, perturb=1e-3)
        report = check_unitarity(model.component(1, 1))
        assert not report.passed
        assert report.max_error > 1e-4

    def test_report_serializes(self, model3):
        data = check_unitarity(model3.component(1, 2)).to_dict()
        assert data['check'] == 'unitarity'
        assert data['passed'] is True


class TestPoles:

    def test_registry_and_channels(self, model3):
        (pole,) = model3.component(1, 1).poles
        assert pole.location == pytest.approx(complex(0, 2 * math.pi / 3))
        assert pole.channel == 's'
        (pole,) = model3.component(1, 2).poles
        assert pole.location == pytest.approx(complex(0, math.pi / 3))
        assert pole.channel == 't'

    def test_locate_matches_registry(self, model4):
        for key in [(1, 1), (1, 2), (1, 3)]:
            c = model4.component(*key)
            located = locate_poles(c)
            registered = [p.location for p in c.poles if 0 < p.location.imag < math.pi]
            assert len(located) == len(registered)
            for z in registered:
                assert min(abs(z - w) for w in located) < 1e-8

    @pytest.mark.parametrize('N', [3, 5])
    def test_s11_pole_position(self, N):
        located = locate_poles(SMatrixModel(N).component(1, 1))
        assert len(located) == 1
        assert located[0] == pytest.approx(complex(0, 2 * math.pi / N), abs=1e-8)

    @pytest.mark.parametrize('N', [3, 4, 5])
    def test_extreme_types_have_few_poles(self, N):
        model = SMatrixModel(N)
        for key in [(1, 1), (1, N - 1), (N - 1, 1), (N - 1, N - 1)]:
            assert 1 <= len(locate_poles(model.component(*key))) <= 2

    def test_residues(self, model3, model4):
        assert residue_at(model3.component(1, 1), complex(0, 2 * math.pi / 3)) == \
            pytest.approx(1j * math.sqrt(3), abs=1e-9)
        assert residue_at(model3.component(1, 2), complex(0, math.pi / 3)) == \
            pytest.approx(-1j * math.sqrt(3), abs=1e-9)
        assert residue_at(model4.component(1, 2), complex(0, 3 * math.pi / 4)) == \
            pytest.approx(2j, abs=1e-9)

    def test_contour_matches_factor_residue(self, model5):
        for c in model5.components.values():
            for p in c.poles:
                if 0 < p.location.imag < math.pi and p.order == 1:
                    assert abs(residue_at(c, p.location) - c.analytic_residue(p.location)) < 1e-9

    def test_unregistered_pole(self, model3):
        with pytest.raises(ContourConflict):
            residue_at(model3.component(1, 1), 1j)

    def test_export_rows(self, model3):
        rows = export_pole_rows(model3)
        assert {(r['alpha'], r['beta'], r['channel']) for r in rows} == {
            (1, 1, 's'), (1, 2, 't'), (2, 1, 't'), (2, 2, 's')}
        assert all(set(r) == {'N', 'alpha', 'beta', 'pole_re', 'pole_im', 'channel', 'residue_re', 'residue_im'}
                   for r in rows)

    def test_strip_grid_excludes_poles(self):
        pole = complex(0.0, 2 * math.pi / 3)
        grid = strip_grid([pole], exclusion=0.3)
        assert np.all(np.abs(grid - pole) > 0.3)
        assert np.all((grid.imag > 0) & (grid.imag < math.pi))
        assert cmath.isfinite(complex(grid[0]))
