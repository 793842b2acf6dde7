"""
Rapidity kinematics, fusion angles and the Z(N) mass spectrum
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import (
    FusionThresholdError,
    InvalidMass,
    InvalidParameter,
    NoFusionSolution,
)

logger = logging.getLogger(__name__)

# Relative distance to the triangle boundary below which fusion is rejected
THRESHOLD_MARGIN = 1e-9
NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class TwoMomentum:
    """Complex two-momentum (p0, p1) in units of mass"""
    p0: complex
    p1: complex

    def invariant_mass_squared(self) -> complex:
        return self.p0 ** 2 - self.p1 ** 2


@dataclass(frozen=True)
class FusionAngles:
    """
    Fusion angles of a process (alpha, beta) -> gamma.

    theta_ab is attached to the first constituent, theta_ba to the second,
    theta_sum is the s-channel pole position divided by i.
    """
    theta_ab: float
    theta_ba: float
    theta_sum: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'theta_sum', self.theta_ab + self.theta_ba)


@dataclass(frozen=True)
class MassSpectrum:
    """Masses of particle types 1..N-1"""
    N: int
    masses: Tuple[float, ...]

    @property
    def m1(self) -> float:
        return self.masses[0]

    def mass(self, alpha: int) -> float:
        if not 1 <= alpha <= self.N - 1:
            raise InvalidParameter(f"particle type {alpha} outside 1..{self.N - 1}")
        return self.masses[alpha - 1]


def in_physical_strip(zeta: complex) -> bool:
    """True if 0 < Im(zeta) < pi"""
    return 0.0 < complex(zeta).imag < math.pi


def mass_shell_momentum(m: float, zeta: complex) -> TwoMomentum:
    """
    On-shell two-momentum p_m(zeta) = (m cosh zeta, m sinh zeta)

    Args:
        m: Positive mass
        zeta: Complex rapidity

    Returns:
        TwoMomentum, entire in zeta
    """
    if not m > 0:
        raise InvalidMass(f"mass must be positive, got {m}")
    zeta = complex(zeta)
    return TwoMomentum(m * np.cosh(zeta), m * np.sinh(zeta))


def _fusion_residual(m_a: float, m_b: float, m_c: float, a: float, b: float) -> complex:
    return m_a * np.exp(1j * a) + m_b * np.exp(-1j * b) - m_c


def _triangle_angles(m_a: float, m_b: float, m_c: float) -> Tuple[float, float]:
    # law of cosines fixes a + b, the sine rule m_a sin a = m_b sin b splits it
    cos_sum = (m_c ** 2 - m_a ** 2 - m_b ** 2) / (2.0 * m_a * m_b)
    total = math.acos(min(1.0, max(-1.0, cos_sum)))
    a = math.atan2(m_b * math.sin(total), m_a + m_b * math.cos(total))
    b = math.atan2(m_a * math.sin(total), m_b + m_a * math.cos(total))
    return a, b


def _wrap(angle: float) -> float:
    """Reduce an angle into [-pi, pi]"""
    return math.remainder(angle, 2.0 * math.pi)


def solve_fusion_angles(m_a: float, m_b: float, m_c: float) -> FusionAngles:
    """
    Solve m_a e^{ia} + m_b e^{-ib} = m_c for the fusion angles (a, b)

    The mass-shell condition p_{m_a}(t + ia) + p_{m_b}(t - ib) = p_{m_c}(t) is
    an identity in t; on light-cone components it reduces to this scalar
    equation. The mass triangle gives the angles in closed form; a damped
    Newton pass in the two real unknowns then polishes the residual.

    Args:
        m_a: Mass of the first constituent
        m_b: Mass of the second constituent
        m_c: Mass of the bound state

    Returns:
        FusionAngles with theta_ab = a, theta_ba = b
    """
    for m in (m_a, m_b, m_c):
        if not m > 0:
            raise InvalidMass(f"masses must be positive, got {(m_a, m_b, m_c)}")

    upper = (m_a + m_b - m_c) / m_c
    lower = (m_c - abs(m_a - m_b)) / m_c
    gap = min(upper, lower)
    if gap < -THRESHOLD_MARGIN:
        raise NoFusionSolution(
            f"triangle condition violated: |{m_a} - {m_b}| < {m_c} < {m_a} + {m_b} fails")
    if gap <= THRESHOLD_MARGIN:
        raise FusionThresholdError(
            f"masses ({m_a}, {m_b}, {m_c}) lie on the fusion threshold")

    tol = 1e-13 * max(1.0, m_c)
    a, b = _triangle_angles(m_a, m_b, m_c)
    residual = _fusion_residual(m_a, m_b, m_c, a, b)

    for iteration in range(NEWTON_MAX_ITER):
        if abs(residual) < tol:
            break
        col_a = 1j * m_a * np.exp(1j * a)
        col_b = -1j * m_b * np.exp(-1j * b)
        jacobian = np.array([[col_a.real, col_b.real], [col_a.imag, col_b.imag]])
        step = np.linalg.solve(jacobian, -np.array([residual.real, residual.imag]))

        damping = 1.0
        while damping > 1e-8:
            trial_a, trial_b = a + damping * step[0], b + damping * step[1]
            trial = _fusion_residual(m_a, m_b, m_c, trial_a, trial_b)
            if abs(trial) < abs(residual):
                break
            damping *= 0.5
        else:
            break
        a, b, residual = trial_a, trial_b, trial
    else:
        logger.debug(f"fusion solver hit {NEWTON_MAX_ITER} iterations, residual {abs(residual):.3e}")

    a, b = _wrap(a), _wrap(b)
    if abs(residual) > 1e-12 * max(1.0, m_c):
        raise NoFusionSolution(f"fusion solver did not converge (residual {abs(residual):.3e})")
    if not (0 < a < math.pi and 0 < b < math.pi):
        raise NoFusionSolution(f"fusion angles ({a}, {b}) outside (0, pi)")

    return FusionAngles(theta_ab=float(a), theta_ba=float(b))


def closed_form_mass(N: int, m1: float, alpha: int) -> float:
    """m_alpha = m1 sin(pi alpha / N) / sin(pi / N)"""
    return m1 * math.sin(math.pi * alpha / N) / math.sin(math.pi / N)


def zn_mass_spectrum(N: int, m1: float) -> MassSpectrum:
    """
    Derive the Z(N) mass spectrum from fusion-pole consistency

    The fusion (1, alpha) -> alpha + 1 must sit at the s-channel pole of the
    bootstrap-built S^{1 alpha}, located at i (alpha + 1) pi / N. Fixing the
    fusion angle fixes the bound-state mass by the law of cosines.

    Args:
        N: Number of sectors, N >= 3
        m1: Mass of particle type 1

    Returns:
        MassSpectrum of types 1..N-1
    """
    if N < 3:
        raise InvalidParameter(f"Z(N) spectrum needs N >= 3, got {N}")
    if not m1 > 0:
        raise InvalidMass(f"mass must be positive, got {m1}")

    masses = [m1]
    for alpha in range(1, N - 1):
        pole = (alpha + 1) * math.pi / N
        m_alpha = masses[-1]
        masses.append(math.sqrt(m1 ** 2 + m_alpha ** 2 + 2 * m1 * m_alpha * math.cos(pole)))

    for alpha, mass in enumerate(masses, start=1):
        expected = closed_form_mass(N, m1, alpha)
        if abs(mass - expected) > 1e-10 * max(1.0, expected):
            raise InvalidParameter(f"mass recursion disagrees with closed form at type {alpha}")
        # antiparticle masses coincide
        if abs(mass - masses[N - 1 - alpha]) > 1e-10 * max(1.0, mass):
            raise InvalidParameter(f"spectrum not palindromic at type {alpha}")

    logger.debug(f"Z({N}) spectrum: {masses}")
    return MassSpectrum(N=N, masses=tuple(masses))


def spectrum_for(N: int, m1: float) -> MassSpectrum:
    """Spectrum including the Ising case N = 2 (a single self-conjugate particle)"""
    if N == 2:
        if not m1 > 0:
            raise InvalidMass(f"mass must be positive, got {m1}")
        return MassSpectrum(N=2, masses=(m1,))
    return zn_mass_spectrum(N, m1)
