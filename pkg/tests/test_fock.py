"""Tests for the truncated Fock space, ZF operators, phi and chi"""
import math

import numpy as np
import pytest

from wedgebound.core.errors import DependencyMissing, DomainError, QuadratureError, RequestError
from wedgebound.fields.fock import FockSpace, FockVector, GaussianWavefunction, Wavefunction
from wedgebound.fields.quadrature import sinh_rule
from wedgebound.fields.testfn import Bump, TestFunction, charge_conjugate, cpt_partner

POINTS = np.array([-0.8, 0.1, 0.9])


class PoledWavefunction(Wavefunction):
    """Gaussian that advertises a singularity at offset 0.5i"""

    def __call__(self, theta):
        return np.exp(-np.asarray(theta, dtype=complex) ** 2)

    def poles(self):
        return (0.5,)


class FarTailWavefunction(Wavefunction):
    """exp(-t^2 / 2), refusing evaluation beyond |t| = 10"""

    def __call__(self, theta):
        t = np.asarray(theta, dtype=complex)
        if np.any(np.abs(t.real) > 10.0):
            raise QuadratureError("evaluated far outside the envelope", 1.0)
        return np.exp(-0.5 * t ** 2)


@pytest.fixture
def h3():
    return {1: GaussianWavefunction.single(1.5, 0.2, 1.0), 2: GaussianWavefunction.single(0.9, -0.4, 0.5j)}


@pytest.fixture(scope='module')
def chi_space(model3, table3):
    return FockSpace(model3, table3.with_eta({(1, 1): 1j, (2, 2): 1j}))


class TestVectors:

    def test_gaussian_norm(self, space3):
        v = space3.gaussian_vector({1: (1.0, 0.3, 2.0)})
        assert space3.inner(v, v) == pytest.approx(4.0 * math.sqrt(math.pi / 2.0), rel=1e-10)

    def test_far_tail_nodes_skipped(self, space3):
        bra = space3.gaussian_vector({1: (0.3, 0.0, 1.0)})
        ket = space3.one_particle({1: FarTailWavefunction()})
        assert space3.inner(bra, ket) == pytest.approx(math.sqrt(math.pi / 0.8), rel=1e-9)

    def test_gaussian_against_onshell(self, space3, f_left):
        phi = space3.apply_phi(f_left, space3.vacuum())
        bra = space3.gaussian_vector({1: (0.8, -0.1, 1.0)})
        nodes, weights = sinh_rule(2)
        expected = np.sum(weights * np.conj(bra.one[1](nodes)) * phi.one[1](nodes))
        assert space3.inner(bra, phi) == pytest.approx(expected, rel=1e-8)

    def test_invalid_type(self, space3):
        with pytest.raises(RequestError):
            space3.gaussian_vector({3: (1.0, 0.0, 1.0)})

    def test_invalid_width(self):
        with pytest.raises(RequestError):
            GaussianWavefunction.single(0.0, 0.0)

    def test_grades_and_arithmetic(self, space3, ket3):
        assert space3.zero().is_zero
        assert space3.vacuum().grades() == {0}
        total = ket3 + space3.vacuum(2.0)
        assert total.grades() == {0, 1}
        scaled = total.scaled(-1j)
        assert scaled.vacuum == pytest.approx(-2j)
        assert scaled.one[1](0.3) == pytest.approx(-1j * ket3.one[1](0.3))

    def test_inner_is_sesquilinear(self, space3, bra3, ket3):
        value = space3.inner(bra3, ket3)
        assert space3.inner(bra3.scaled(2j), ket3) == pytest.approx(-2j * value, rel=1e-10)
        assert space3.inner(ket3, bra3) == pytest.approx(np.conj(value), rel=1e-10)


class TestZFOperators:

    def test_create_on_vacuum(self, space3, h3):
        v = space3.zf_create(h3, space3.vacuum(2.0))
        assert v.grades() == {1}
        assert np.allclose(v.one[2](POINTS), 2.0 * h3[2](POINTS))

    def test_two_particle_symmetry(self, space3, model3, h3, ket3):
        phi = space3.zf_create(h3, ket3)
        assert phi.grades() == {2}
        t1, t2 = 0.3, -0.5
        for a, b in [(1, 1), (1, 2), (2, 1), (2, 2)]:
            swapped = model3.evaluate(b, a, t2 - t1) * phi.two[(b, a)](t2, t1)
            assert phi.two[(a, b)](t1, t2) == pytest.approx(swapped, rel=1e-12)

    def test_annihilate_after_create(self, space3, h3):
        v = space3.zf_annihilate(h3, space3.zf_create(h3, space3.vacuum()))
        norm = space3.inner(space3.one_particle(h3), space3.one_particle(h3))
        assert v.vacuum == pytest.approx(norm, rel=1e-10)

    def test_annihilation_is_adjoint(self, space3, h3, bra3, ket3):
        two = space3.zf_create(h3, bra3)
        left = space3.inner(two, space3.zf_create(h3, ket3))
        right = space3.inner(space3.zf_annihilate(h3, two), ket3)
        assert left == pytest.approx(right, rel=1e-6)

    def test_truncation_flag(self, space3, h3, ket3):
        two = space3.zf_create(h3, ket3)
        assert space3.zf_create(h3, two).truncated
        assert not space3.zf_create(h3, two, grades={1, 2}).truncated

    def test_grade_projection(self, space3, h3, ket3):
        v = space3.zf_create(h3, ket3 + space3.vacuum(), grades={1})
        assert v.grades() == {1}


class TestFields:

    def test_phi_on_vacuum(self, space3, f_left):
        v = space3.apply_phi(f_left, space3.vacuum())
        assert v.grades() == {1}
        expected = space3.onshell(f_left, 1, 1)(POINTS)
        assert np.allclose(v.one[1](POINTS), expected)

    def test_phi_linear(self, space3, f_left, g_right, bra3, ket3):
        combined = space3.apply_phi(f_left.scaled(2j) + g_right, space3.vacuum())
        first = space3.apply_phi(f_left, space3.vacuum())
        second = space3.apply_phi(g_right, space3.vacuum())
        for alpha in (1, 2):
            expected = 2j * first.one[alpha](POINTS) + second.one[alpha](POINTS)
            assert np.allclose(combined.one[alpha](POINTS), expected, rtol=1e-12, atol=0)
        mixed = space3.apply_phi(f_left, ket3.scaled(3.0) + bra3, grades={2})
        parts = (space3.apply_phi(f_left, ket3, grades={2}), space3.apply_phi(f_left, bra3, grades={2}))
        for key in mixed.two:
            expected = 3.0 * parts[0].two[key](0.3, -0.2) + parts[1].two[key](0.3, -0.2)
            assert mixed.two[key](0.3, -0.2) == pytest.approx(expected, rel=1e-12)

    def test_vacuum_two_point(self, space3, f_left, g_right):
        ket = space3.apply_phi(f_left, space3.apply_phi(g_right, space3.vacuum()))
        value = space3.inner(space3.vacuum(), ket)
        # sum over alpha of int f^-_{bar alpha}(t) g^+_alpha(t) dt on a finer rule
        nodes, weights = sinh_rule(2)
        expected = sum(
            np.sum(weights * space3.onshell(f_left, space3.antiparticle(alpha), -1)(nodes)
                   * space3.onshell(g_right, alpha, 1)(nodes))
            for alpha in g_right.types
        )
        assert abs(value) > 0
        assert value == pytest.approx(expected, rel=1e-6)

    def test_phi_reflected_on_vacuum(self, space3):
        g = TestFunction.from_mapping(3, {1: [Bump((0.1, 2.2), 1.2, 0.8 + 0.3j)]})
        v = space3.apply_phi_reflected(g, space3.vacuum())
        assert v.grades() == {1}
        # J undoes the type bar of the partner: the antiparticles of cpt_partner(g) are g's own types
        assert v.types() == {space3.antiparticle(a) for a in cpt_partner(g).types} == {1}
        assert np.allclose(v.one[1](POINTS), space3.onshell(g, 1, 1)(POINTS), rtol=1e-8, atol=0)

    def test_J_is_antiunitary(self, space3, bra3, ket3):
        value = space3.inner(space3.J(bra3), space3.J(ket3))
        assert value == pytest.approx(np.conj(space3.inner(bra3, ket3)), rel=1e-10)

    def test_J_is_involution(self, space3, ket3):
        twice = space3.J(space3.J(ket3))
        for alpha in ket3.one:
            assert np.allclose(twice.one[alpha](POINTS + 0.2j), ket3.one[alpha](POINTS + 0.2j))

    def test_J_swaps_types(self, space3, model3, h3, ket3):
        two = space3.zf_create(h3, ket3)
        reflected = space3.J(two)
        value = reflected.two[(2, 1)](0.4, -0.1)
        assert value == pytest.approx(np.conj(two.two[(2, 1)](-0.1, 0.4)), rel=1e-12)


class TestChi:

    def test_needs_table(self, model3, f_left, ket3):
        with pytest.raises(DependencyMissing):
            FockSpace(model3).apply_chi(f_left, ket3)

    def test_rejects_two_particles(self, chi_space, f_left, h3, ket3):
        with pytest.raises(RequestError):
            chi_space.apply_chi(f_left, chi_space.zf_create(h3, ket3))

    def test_pole_inside_shift(self, chi_space, f_left):
        psi = chi_space.one_particle({1: PoledWavefunction()})
        with pytest.raises(DomainError):
            chi_space.apply_chi(f_left, psi)

    def test_zero_eta_gives_zero(self, space3, f_left, ket3):
        assert space3.apply_chi(f_left, ket3).is_zero

    def test_shifted_product(self, chi_space, f_left, ket3):
        out = chi_space.apply_chi(f_left, ket3)
        assert out.types() == {1, 2}
        t = 0.2
        shift = math.pi / 3
        expected = chi_space.onshell(f_left, 1, 1)(t + 1j * shift) * ket3.one[1](t - 1j * shift)
        assert out.one[2](t) == pytest.approx(expected, rel=1e-12)

    def test_linear(self, chi_space, f_left, g_right, bra3, ket3):
        combined = chi_space.apply_chi(f_left.scaled(-0.5) + g_right, ket3.scaled(2.0) + bra3)
        pieces = [(-1.0, f_left, ket3), (-0.5, f_left, bra3), (2.0, g_right, ket3), (1.0, g_right, bra3)]
        for gamma in (1, 2):
            expected = sum(c * chi_space.apply_chi(f, psi).one[gamma](POINTS) for c, f, psi in pieces)
            assert np.allclose(combined.one[gamma](POINTS), expected, rtol=1e-12, atol=0)

    def test_symmetric_form(self, chi_space, f_left, bra3, ket3):
        # the bound-state partner of f carries the antiparticle types and the conjugate amplitudes
        left = chi_space.inner(bra3, chi_space.apply_chi(f_left, ket3))
        right = chi_space.inner(chi_space.apply_chi(charge_conjugate(f_left), bra3), ket3)
        assert abs(left) > 0
        assert left == pytest.approx(right, rel=1e-6)

    def test_ignores_missing_types(self, chi_space, ket3):
        f = TestFunction.zero(3)
        assert chi_space.apply_chi(f, ket3).is_zero


class TestSerialization:

    def test_vector_round_trip(self, space3, h3, ket3, f_left):
        v = space3.zf_create(h3, ket3) + space3.apply_phi(f_left, space3.vacuum(0.5))
        restored = space3.vector_from_dict(v.to_dict())
        assert isinstance(restored, FockVector)
        assert restored.grades() == v.grades()
        assert restored.vacuum == v.vacuum
        for alpha in v.one:
            assert np.allclose(restored.one[alpha](POINTS), v.one[alpha](POINTS))
        for key in v.two:
            assert restored.two[key](0.3, -0.2) == pytest.approx(v.two[key](0.3, -0.2))

    def test_unknown_kind(self, space3):
        with pytest.raises(RequestError):
            space3.wavefunction_from_dict({'kind': 'spline'})
