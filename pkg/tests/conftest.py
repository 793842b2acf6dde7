"""Shared fixtures: models, wedge test functions and Gaussian vectors"""
import pytest

from wedgebound.core.fusion import attach_residues, build_fusion_table, calibrate_eta
from wedgebound.core.smatrix import SMatrixModel
from wedgebound.fields.fock import FockSpace
from wedgebound.fields.testfn import Bump, TestFunction, Wedge


@pytest.fixture(scope='session')
def model3():
    return SMatrixModel(3)


@pytest.fixture(scope='session')
def model4():
    return SMatrixModel(4)


@pytest.fixture(scope='session')
def model5():
    return SMatrixModel(5)


@pytest.fixture(scope='session')
def table3(model3):
    return attach_residues(build_fusion_table(3, model3.spectrum), model3)


@pytest.fixture(scope='session')
def calibrated3(model3, table3):
    return calibrate_eta(table3, model3)


@pytest.fixture(scope='session')
def space3(model3, table3):
    return FockSpace(model3, table3)


@pytest.fixture(scope='session')
def calibrated_space3(model3, calibrated3):
    return FockSpace(model3, calibrated3)


@pytest.fixture
def left_wedge():
    return Wedge('left')


@pytest.fixture
def right_wedge():
    return Wedge('right')


@pytest.fixture
def f_left():
    """Types 1 and 2 of N=3, well inside the left wedge"""
    return TestFunction.from_mapping(3, {
        1: [Bump((0.0, -2.0), 1.2, 1.0)],
        2: [Bump((0.2, -2.4), 1.2, 0.7)],
    }, 'f')


@pytest.fixture
def g_right():
    """Types 1 and 2 of N=3, well inside the right wedge"""
    return TestFunction.from_mapping(3, {
        1: [Bump((0.1, 2.2), 1.2, 0.8)],
        2: [Bump((-0.2, 2.1), 1.2, 1.1)],
    }, 'g')


@pytest.fixture
def bra3(space3):
    return space3.gaussian_vector({1: (1.0, 0.3, 1.0), 2: (1.2, -0.2, 0.5 + 0.3j)})


@pytest.fixture
def ket3(space3):
    return space3.gaussian_vector({1: (0.8, -0.1, 1.0), 2: (1.0, 0.4, 1.0)})
