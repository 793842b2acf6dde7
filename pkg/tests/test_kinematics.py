"""Tests for rapidity kinematics, fusion angles and mass spectra"""
import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from wedgebound.core.errors import FusionThresholdError, InvalidMass, InvalidParameter, NoFusionSolution
from wedgebound.core.kinematics import (
    closed_form_mass, in_physical_strip, mass_shell_momentum, solve_fusion_angles,
    spectrum_for, zn_mass_spectrum,
)

masses = st.floats(min_value=0.1, max_value=10.0)
real_parts = st.floats(min_value=-3.0, max_value=3.0)
imag_parts = st.floats(min_value=-3.0, max_value=3.0)


class TestMassShell:

    @given(masses, real_parts, imag_parts)
    def test_invariant_mass(self, m, x, y):
        p = mass_shell_momentum(m, complex(x, y))
        assert p.invariant_mass_squared() == pytest.approx(m ** 2, rel=1e-9, abs=1e-9 * math.cosh(x) ** 2 * m ** 2)

    def test_against_mpmath(self):
        mpmath.mp.dps = 30
        for zeta in (0.3 + 0.5j, -1.2 + 2.9j, 2.0 - 0.1j):
            p = mass_shell_momentum(1.7, zeta)
            z = mpmath.mpc(zeta.real, zeta.imag)
            assert abs(p.p0 - complex(1.7 * mpmath.cosh(z))) < 1e-13
            assert abs(p.p1 - complex(1.7 * mpmath.sinh(z))) < 1e-13

    @pytest.mark.parametrize('m', [0.0, -1.0])
    def test_rejects_nonpositive_mass(self, m):
        with pytest.raises(InvalidMass):
            mass_shell_momentum(m, 0.1)

    def test_physical_strip(self):
        assert in_physical_strip(1j)
        assert not in_physical_strip(0.5)
        assert not in_physical_strip(complex(0, math.pi))


class TestFusionAngles:

    def test_n3_equal_masses(self):
        angles = solve_fusion_angles(1.0, 1.0, 1.0)
        assert angles.theta_ab == pytest.approx(math.pi / 3, abs=1e-12)
        assert angles.theta_ba == pytest.approx(math.pi / 3, abs=1e-12)
        assert angles.theta_sum == pytest.approx(2 * math.pi / 3, abs=1e-12)

    def test_n4_unequal_masses(self):
        angles = solve_fusion_angles(1.0, math.sqrt(2), 1.0)
        assert angles.theta_ab == pytest.approx(math.pi / 2, abs=1e-12)
        assert angles.theta_ba == pytest.approx(math.pi / 4, abs=1e-12)

    def test_above_n_wraps(self):
        # (2, 3) -> 1 for N = 4
        angles = solve_fusion_angles(math.sqrt(2), 1.0, 1.0)
        assert angles.theta_ab == pytest.approx(math.pi / 4, abs=1e-12)
        assert angles.theta_ba == pytest.approx(math.pi / 2, abs=1e-12)

    def test_threshold(self):
        with pytest.raises(FusionThresholdError):
            solve_fusion_angles(1.0, 1.0, 2.0)

    def test_no_solution(self):
        with pytest.raises(NoFusionSolution):
            solve_fusion_angles(1.0, 1.0, 3.0)

    def test_bad_mass(self):
        with pytest.raises(InvalidMass):
            solve_fusion_angles(1.0, -1.0, 1.0)

    def test_unequal_masses_large_n(self):
        # (1, 2) -> 3 for N = 13, both angles inside (0, pi)
        spectrum = zn_mass_spectrum(13, 1.0)
        angles = solve_fusion_angles(spectrum.mass(1), spectrum.mass(2), spectrum.mass(3))
        assert angles.theta_ab == pytest.approx(2 * math.pi / 13, abs=1e-12)
        assert angles.theta_ba == pytest.approx(math.pi / 13, abs=1e-12)

    @given(st.integers(min_value=3, max_value=20), st.data())
    def test_zn_angles(self, N, data):
        alpha = data.draw(st.integers(min_value=1, max_value=N - 1))
        beta = data.draw(st.integers(min_value=1, max_value=N - 1))
        gamma = (alpha + beta) % N
        if gamma == 0:
            return
        spectrum = zn_mass_spectrum(N, 1.0)
        angles = solve_fusion_angles(spectrum.mass(alpha), spectrum.mass(beta), spectrum.mass(gamma))
        if alpha + beta < N:
            assert angles.theta_ab == pytest.approx(beta * math.pi / N, abs=1e-10)
            assert angles.theta_ba == pytest.approx(alpha * math.pi / N, abs=1e-10)
        else:
            assert angles.theta_ab == pytest.approx(math.pi - beta * math.pi / N, abs=1e-10)
            assert angles.theta_ba == pytest.approx(math.pi - alpha * math.pi / N, abs=1e-10)


class TestSpectrum:

    @given(st.integers(min_value=3, max_value=16), st.floats(min_value=0.1, max_value=5.0))
    def test_palindromic_and_closed_form(self, N, m1):
        spectrum = zn_mass_spectrum(N, m1)
        for alpha in range(1, N):
            assert spectrum.mass(alpha) == pytest.approx(spectrum.mass(N - alpha), rel=1e-12)
            assert spectrum.mass(alpha) == pytest.approx(closed_form_mass(N, m1, alpha), rel=1e-12)

    def test_n3_degenerate(self):
        assert zn_mass_spectrum(3, 1.0).masses == pytest.approx((1.0, 1.0))

    def test_n2(self):
        with pytest.raises(InvalidParameter):
            zn_mass_spectrum(2, 1.0)
        assert spectrum_for(2, 1.0).masses == (1.0,)

    def test_type_out_of_range(self):
        with pytest.raises(InvalidParameter):
            zn_mass_spectrum(4, 1.0).mass(4)
