"""
Z(N) fusion table, antiparticles and bound-state couplings eta
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .errors import CalibrationFailure, InvalidParameter, NoFusionSolution
from .kinematics import FusionAngles, MassSpectrum, solve_fusion_angles
from .smatrix import PI, AxiomReport, SMatrixModel, locate_poles, residue_at

logger = logging.getLogger(__name__)

CALIBRATION_TOL = 1e-3
POLE_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class ParticleType:
    """Particle type 1..N-1 of the Z(N) model"""
    index: int
    N: int

    def __post_init__(self):
        if not 1 <= self.index <= self.N - 1:
            raise InvalidParameter(f"particle type {self.index} outside 1..{self.N - 1}")

    @property
    def antiparticle(self) -> 'ParticleType':
        return ParticleType(self.N - self.index, self.N)

    def __int__(self) -> int:
        return self.index


def antiparticle(alpha, N: Optional[int] = None) -> ParticleType:
    """Antiparticle N - alpha of a ParticleType, or of an integer type with N given"""
    if isinstance(alpha, ParticleType):
        return alpha.antiparticle
    if N is None:
        raise InvalidParameter("N is required for an integer particle type")
    return ParticleType(int(alpha), N).antiparticle


@dataclass(frozen=True)
class FusionProcess:
    """
    Fusion (alpha, beta) -> gamma with its angles, s-channel residue and eta

    eta_source is one of 'unset', 'fit', 'residue' (orbit not constrained by
    the calibration family, eta taken from 2 pi |Res|) or 'zeroed'.
    """
    alpha: int
    beta: int
    gamma: int
    angles: FusionAngles
    eta: complex = 0j
    residue: complex = 0j
    eta_source: str = 'unset'

    @property
    def key(self) -> Tuple[int, int]:
        return (self.alpha, self.beta)

    @property
    def s_pole(self) -> complex:
        return complex(0.0, self.angles.theta_sum)


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of the eta fit"""
    orbits: Tuple[Tuple[Tuple[int, int], ...], ...]
    couplings: Tuple[float, ...]
    fitted: Tuple[bool, ...]
    relative_residual: float
    residuals: Tuple[float, ...]
    pairs: int

    def to_dict(self) -> dict:
        return {
            'orbits': [[list(k) for k in orbit] for orbit in self.orbits],
            'couplings': list(self.couplings),
            'fitted': list(self.fitted),
            'relative_residual': self.relative_residual,
            'residuals': list(self.residuals),
            'pairs': self.pairs,
        }


@dataclass(frozen=True)
class FusionTable:
    """Fusion processes keyed by (alpha, beta)"""
    N: int
    processes: Mapping[Tuple[int, int], FusionProcess] = field(default_factory=dict)
    calibration: Optional[CalibrationResult] = None

    def __iter__(self) -> Iterator[FusionProcess]:
        return iter(self.processes[key] for key in sorted(self.processes))

    def __len__(self) -> int:
        return len(self.processes)

    def __contains__(self, key) -> bool:
        return tuple(key) in self.processes

    def get(self, alpha: int, beta: int) -> Optional[FusionProcess]:
        return self.processes.get((alpha, beta))

    def processes_into(self, gamma: int) -> List[FusionProcess]:
        return [p for p in self if p.gamma == gamma]

    def with_updates(self, updates: Mapping[Tuple[int, int], Mapping], calibration=None) -> 'FusionTable':
        processes = dict(self.processes)
        for key, changes in updates.items():
            processes[key] = replace(processes[key], **changes)
        return FusionTable(self.N, processes, calibration if calibration is not None else self.calibration)

    def with_eta(self, etas: Mapping[Tuple[int, int], complex], source: str = 'fit') -> 'FusionTable':
        return self.with_updates({key: {'eta': complex(eta), 'eta_source': source} for key, eta in etas.items()})

    def zeroed(self) -> 'FusionTable':
        """Same table with every eta set to zero"""
        return self.with_eta({key: 0j for key in self.processes}, source='zeroed')


def build_fusion_table(N: int, spectrum: MassSpectrum) -> FusionTable:
    """
    Fusion processes (alpha, beta) -> alpha + beta mod N

    Particle-antiparticle pairs (alpha + beta = 0 mod N) carry no process.

    Args:
        N: Number of sectors
        spectrum: Masses of the particle types

    Returns:
        FusionTable without residues or eta
    """
    if spectrum.N != N:
        raise InvalidParameter(f"spectrum is for N={spectrum.N}, not N={N}")
    processes = {}
    for alpha in range(1, N):
        for beta in range(1, N):
            gamma = (alpha + beta) % N
            if gamma == 0:
                continue
            try:
                angles = solve_fusion_angles(spectrum.mass(alpha), spectrum.mass(beta), spectrum.mass(gamma))
            except NoFusionSolution as e:
                raise type(e)(f"process ({alpha},{beta})->{gamma}: {e}") from e
            processes[(alpha, beta)] = FusionProcess(alpha, beta, gamma, angles)
    logger.debug(f"fusion table for N={N}: {len(processes)} processes")
    return FusionTable(N, processes)


def attach_residues(table: FusionTable, model: SMatrixModel) -> FusionTable:
    """Contour residue of S^{alpha beta} at each s-channel pole (0 if the component has none)"""
    updates = {}
    for process in table:
        component = model.component(process.alpha, process.beta)
        registered = any(abs(p.location - process.s_pole) < POLE_MATCH_TOL for p in component.poles)
        residue = residue_at(component, process.s_pole) if registered else 0j
        updates[process.key] = {'residue': residue}
    return table.with_updates(updates)


def check_pole_consistency(table: FusionTable, model: SMatrixModel) -> List[AxiomReport]:
    """i * theta_sum of each process against the located poles of S^{alpha beta}"""
    reports = []
    located: Dict[Tuple[int, int], List[complex]] = {}
    for process in table:
        key = process.key
        if key not in located:
            located[key] = locate_poles(model.component(*key))
        distances = [abs(p - process.s_pole) for p in located[key]]
        error = min(distances) if distances else float('inf')
        reports.append(AxiomReport(
            check='s_pole', target=f"({process.alpha},{process.beta})->{process.gamma}",
            max_error=float(error), tolerance=POLE_MATCH_TOL,
            passed=bool(error < POLE_MATCH_TOL), points=len(distances),
        ))
    return reports


def expected_eta_squared(process: FusionProcess) -> float:
    """Analytic expectation |eta|^2 = 2 pi |Res| at the s-channel pole"""
    return 2.0 * PI * abs(process.residue)


def eta_ratio(process: FusionProcess) -> float:
    """|eta|^2 / (2 pi |Res|), nan when the residue vanishes"""
    expected = expected_eta_squared(process)
    if expected == 0:
        return float('nan')
    return abs(process.eta) ** 2 / expected


def coupling_orbits(table: FusionTable) -> List[Tuple[Tuple[int, int], ...]]:
    """Group processes related by parity (a,b)<->(b,a) and charge conjugation (a,b)<->(bar a, bar b)"""
    N = table.N
    seen = set()
    orbits = []
    for key in sorted(table.processes):
        if key in seen:
            continue
        orbit, frontier = set(), [key]
        while frontier:
            a, b = frontier.pop()
            if (a, b) in orbit or (a, b) not in table.processes:
                continue
            orbit.add((a, b))
            frontier.extend([(b, a), (N - a, N - b)])
        seen |= orbit
        orbits.append(tuple(sorted(orbit)))
    return orbits


def calibrate_eta(table: FusionTable, model: SMatrixModel, requests: Optional[Sequence] = None,
                  settings=None, zero_eta: bool = False) -> FusionTable:
    """
    Fit eta so that [phi, phi'] + [chi, chi'] vanishes on a calibration family

    eta is taken as i*y with y >= 0 on each parity/conjugation orbit. The
    chi commutator is a quadratic form in y, assembled by polarization.

    Args:
        table: Table with residues attached
        model: S-matrix model
        requests: Calibration matrix-element requests (default scenario if None)
        settings: Quadrature settings for the Fock space
        zero_eta: Skip the fit and set every eta to zero

    Returns:
        Table with eta filled and the CalibrationResult attached
    """
    if zero_eta:
        logger.warning("eta set to zero; the bound-state operator is switched off")
        return table.zeroed()
    if not len(table):
        return table

    from ..analysis import weaklocality
    from ..fields.fock import FockSpace

    orbits = coupling_orbits(table)
    if all(p.residue == 0 for p in table):
        # no s-channel poles, nothing to cancel
        result = CalibrationResult(tuple(orbits), tuple(0.0 for _ in orbits), tuple(False for _ in orbits),
                                   0.0, (), 0)
        return table.with_updates({key: {'eta': 0j, 'eta_source': 'residue'} for key in table.processes},
                                  calibration=result)

    initial = np.array([
        math.sqrt(np.mean([expected_eta_squared(table.processes[k]) for k in orbit])) for orbit in orbits
    ])

    def table_for(weights: Mapping[int, float]) -> FusionTable:
        etas = {key: 0j for key in table.processes}
        for index, weight in weights.items():
            for key in orbits[index]:
                etas[key] = 1j * weight
        return table.with_eta(etas)

    space = FockSpace(model, table, settings)
    if requests is None:
        requests = weaklocality.default_scenario(space)
    requests = list(requests)

    phi = np.array([weaklocality.phi_commutator_element(req, space).value for req in requests], dtype=complex)

    def chi_values(weights: Mapping[int, float]) -> np.ndarray:
        trial = space.with_table(table_for(weights))
        return np.array([weaklocality.chi_commutator_element(req, trial).value for req in requests],
                        dtype=complex)

    k = len(orbits)
    form = np.zeros((len(requests), k, k), dtype=complex)
    diagonal = [chi_values({o: 1.0}) for o in range(k)]
    for o in range(k):
        form[:, o, o] = diagonal[o]
    for o in range(k):
        for p in range(o + 1, k):
            mixed = chi_values({o: 1.0, p: 1.0})
            form[:, o, p] = form[:, p, o] = 0.5 * (mixed - diagonal[o] - diagonal[p])

    magnitude = float(np.max(np.abs(phi))) if phi.size else 0.0
    size = max(magnitude, float(np.max(np.abs(form))) if form.size else 0.0)
    active = [bool(np.max(np.abs(form[:, o, :])) > 1e-12 * max(size, 1e-300)) if phi.size else False
              for o in range(k)]
    couplings = initial.copy()
    norm = float(np.linalg.norm(phi))

    def residual(y_active: np.ndarray) -> np.ndarray:
        y = couplings.copy()
        y[active] = y_active
        r = phi + np.einsum('nij,i,j->n', form, y, y)
        r = r / (norm if norm > 0 else 1.0)
        return np.concatenate([r.real, r.imag])

    if any(active):
        if norm == 0.0:
            couplings[active] = 0.0
        else:
            start = np.maximum(initial[active], 1e-6)
            fit = least_squares(residual, start, bounds=(0.0, np.inf), xtol=1e-14, ftol=1e-14, gtol=1e-14)
            couplings[active] = fit.x

    r = residual(couplings[active]) if any(active) else np.zeros(2 * len(requests))
    per_pair = np.abs(r[:len(requests)] + 1j * r[len(requests):]) * (norm if norm > 0 else 1.0)
    per_pair = per_pair / np.maximum(np.abs(phi), 1e-300) if phi.size else per_pair
    relative = float(np.linalg.norm(r)) if norm > 0 else 0.0
    logger.debug(f"eta calibration: couplings {couplings}, relative residual {relative:.3e}")

    if relative > CALIBRATION_TOL:
        raise CalibrationFailure(
            f"eta calibration residual {relative:.3e} exceeds {CALIBRATION_TOL:g}", per_pair.tolist())

    etas, sources = {}, {}
    for o, orbit in enumerate(orbits):
        for key in orbit:
            etas[key] = 1j * couplings[o]
            sources[key] = 'fit' if active[o] else 'residue'
    result = CalibrationResult(
        orbits=tuple(orbits),
        couplings=tuple(float(c) for c in couplings),
        fitted=tuple(active),
        relative_residual=relative,
        residuals=tuple(float(x) for x in per_pair),
        pairs=len(requests),
    )
    return table.with_updates(
        {key: {'eta': etas[key], 'eta_source': sources[key]} for key in etas}, calibration=result)


def export_rows(table: FusionTable) -> List[dict]:
    """CSV rows N, alpha, beta, gamma, theta_ab, theta_ba, pole_im, residue, eta_re, eta_im"""
    return [
        {
            'N': table.N,
            'alpha': p.alpha,
            'beta': p.beta,
            'gamma': p.gamma,
            'theta_ab': p.angles.theta_ab,
            'theta_ba': p.angles.theta_ba,
            'pole_im': p.angles.theta_sum,
            'residue': repr(complex(p.residue)),
            'eta_re': complex(p.eta).real,
            'eta_im': complex(p.eta).imag,
        }
        for p in table
    ]
