"""
Z(N)-Ising two-body S-matrix

Every component is stored exactly as a signed ratio of factors
sinh(1/2 (zeta + i a)), so bootstrap products, pole registries and
analytic residues are bookkeeping on the shift lists. Numerical checks
(unitarity, crossing, pole scans, contour residues) run on the evaluator.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ContourConflict,
    DependencyMissing,
    InvalidParameter,
    PoleProximity,
    PoleRefinementFailure,
    QuadratureError,
)
from .kinematics import FusionAngles, MassSpectrum, solve_fusion_angles, spectrum_for

logger = logging.getLogger(__name__)

POLE_RADIUS = 1e-12
SHIFT_TOL = 1e-9
UNITARITY_TOL = 1e-10
CROSSING_TOL = 1e-8
SYMMETRY_TOL = 1e-10
PATH_TOL = 1e-8
PI = math.pi
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Pole:
    """A registered pole in the closed physical strip"""
    location: complex
    order: int
    channel: str = ''


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one numerical axiom check"""
    check: str
    target: str
    max_error: float
    tolerance: float
    passed: bool
    points: int
    details: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'check': self.check,
            'target': self.target,
            'max_error': self.max_error,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'points': self.points,
            **self.details,
        }


def _normalize_shift(shift: float) -> Tuple[float, int]:
    """Reduce a shift into (-pi, pi]; returns (shift, number of 2 pi moves)"""
    j = math.floor((shift + PI) / TWO_PI)
    reduced = shift - TWO_PI * j
    if reduced <= -PI + SHIFT_TOL:
        reduced += TWO_PI
        j -= 1
    if abs(reduced - PI) <= SHIFT_TOL:
        reduced = PI
    if abs(reduced) <= SHIFT_TOL:
        reduced = 0.0
    return reduced, j


def _canonical_factors(numerator: Iterable[float], denominator: Iterable[float],
                       sign: int) -> Tuple[Tuple[float, ...], Tuple[float, ...], int]:
    # each 2 pi move of a shift flips the sign of its sinh factor
    num, den = [], []
    for shift in numerator:
        reduced, moves = _normalize_shift(shift)
        num.append(reduced)
        sign *= (-1) ** (moves % 2)
    for shift in denominator:
        reduced, moves = _normalize_shift(shift)
        den.append(reduced)
        sign *= (-1) ** (moves % 2)

    remaining = []
    for d in den:
        match = next((k for k, n in enumerate(num) if abs(n - d) <= SHIFT_TOL), None)
        if match is None:
            remaining.append(d)
        else:
            num.pop(match)
    return tuple(sorted(num)), tuple(sorted(remaining)), int(sign)


def _pole_locations(denominator: Sequence[float]) -> List[Tuple[complex, int]]:
    """Poles in the closed strip 0 <= Im <= pi with their orders"""
    locations = []
    for d in denominator:
        if d <= SHIFT_TOL:
            locations.append(-d)
        elif abs(d - PI) <= SHIFT_TOL:
            locations.append(PI)
    grouped: List[Tuple[float, int]] = []
    for im in sorted(locations):
        if grouped and abs(grouped[-1][0] - im) <= SHIFT_TOL:
            grouped[-1] = (grouped[-1][0], grouped[-1][1] + 1)
        else:
            grouped.append((im, 1))
    return [(complex(0.0, im), order) for im, order in grouped]


def _nearest_singularity(zeta: np.ndarray, shift: float) -> Tuple[np.ndarray, np.ndarray]:
    # zeros of sinh(1/2 (zeta + i d)) are at -i d + 2 pi i k
    w = zeta + 1j * shift
    reduced_im = np.mod(w.imag + PI, TWO_PI) - PI
    offset = w.real + 1j * reduced_im
    return np.abs(offset), zeta - offset


@dataclass(frozen=True)
class SComponent:
    """
    Two-body S-matrix component S^{alpha beta}

    S(zeta) = sign * prod sinh(1/2 (zeta + i n_k)) / prod sinh(1/2 (zeta + i d_k))
              + perturbation
    """
    alpha: int
    beta: int
    N: int
    numerator: Tuple[float, ...] = ()
    denominator: Tuple[float, ...] = ()
    sign: int = 1
    perturbation: complex = 0.0
    poles: Tuple[Pole, ...] = ()

    @classmethod
    def from_factors(cls, alpha: int, beta: int, N: int,
                     numerator: Iterable[float], denominator: Iterable[float],
                     sign: int = 1,
                     channel_of: Optional[Callable[[complex], str]] = None) -> 'SComponent':
        """Normalize shifts, cancel common factors and register poles"""
        num, den, sign = _canonical_factors(numerator, denominator, sign)
        if len(num) != len(den):
            raise InvalidParameter(
                f"S^{alpha}{beta}: unbalanced factor lists ({len(num)} over {len(den)})")
        poles = tuple(
            Pole(location, order, channel_of(location) if channel_of else '')
            for location, order in _pole_locations(den)
        )
        return cls(alpha, beta, N, num, den, sign, 0.0, poles)

    @classmethod
    def constant(cls, alpha: int, beta: int, N: int, value: int = 1) -> 'SComponent':
        return cls(alpha, beta, N, (), (), value)

    @property
    def label(self) -> str:
        return f"S^{{{self.alpha}{self.beta}}}"

    @property
    def is_exact(self) -> bool:
        return self.perturbation == 0

    def with_perturbation(self, eps: complex) -> 'SComponent':
        return replace(self, perturbation=complex(eps))

    def singularities(self, images: Sequence[int] = (-1, 0, 1, 2)) -> List[complex]:
        """All denominator zeros, including periodic images outside the strip"""
        points = []
        for d in self.denominator:
            for k in images:
                points.append(complex(0.0, -d + TWO_PI * k))
        return points

    def evaluate_raw(self, zeta) -> np.ndarray:
        """Evaluate without pole-proximity checks (inf/nan at poles)"""
        z = np.asarray(zeta, dtype=complex)
        value = np.full(z.shape, complex(self.sign))
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            # paired ratios stay bounded for large |Re zeta|
            for n, d in zip(self.numerator, self.denominator):
                value = value * (np.sinh(0.5 * (z + 1j * n)) / np.sinh(0.5 * (z + 1j * d)))
        return value + self.perturbation

    def __call__(self, zeta):
        """
        Evaluate at complex rapidity difference(s)

        Raises:
            PoleProximity: if any point lies within 1e-12 of a pole
        """
        z = np.asarray(zeta, dtype=complex)
        for d in self.denominator:
            distance, pole = _nearest_singularity(z, d)
            close = distance < POLE_RADIUS
            if np.any(close):
                raise PoleProximity(complex(np.atleast_1d(pole)[np.argmax(np.atleast_1d(close))]))
        value = self.evaluate_raw(z)
        if np.ndim(zeta) == 0:
            return complex(value)
        return value

    def shifted(self, delta: float) -> Tuple[List[float], List[float]]:
        """Factor shifts of zeta -> S(zeta + i delta)"""
        return ([n + delta for n in self.numerator], [d + delta for d in self.denominator])

    def analytic_residue(self, pole: complex) -> complex:
        """Residue at a simple pole from the factor representation"""
        z0 = complex(pole)
        hits = [k for k, d in enumerate(self.denominator)
                if _nearest_singularity(np.asarray(z0), d)[0] < 1e-8]
        if len(hits) != 1:
            raise ContourConflict(f"{self.label}: {z0} is not a simple pole (multiplicity {len(hits)})")
        hit = hits[0]
        value = complex(self.sign)
        for n in self.numerator:
            value *= np.sinh(0.5 * (z0 + 1j * n))
        for k, d in enumerate(self.denominator):
            if k == hit:
                value /= 0.5 * np.cosh(0.5 * (z0 + 1j * d))
            else:
                value /= np.sinh(0.5 * (z0 + 1j * d))
        return complex(value)

    def to_dict(self) -> dict:
        return {
            'alpha': self.alpha,
            'beta': self.beta,
            'N': self.N,
            'sign': self.sign,
            'numerator': list(self.numerator),
            'denominator': list(self.denominator),
            'perturbation': [self.perturbation.real, self.perturbation.imag],
            'poles': [
                {'re': p.location.real, 'im': p.location.imag, 'order': p.order, 'channel': p.channel}
                for p in self.poles
            ],
        }


def s11(N: int, zeta):
    """
    Closed-form seed S^{11}(zeta) = sinh(1/2(zeta + 2 pi i/N)) / sinh(1/2(zeta - 2 pi i/N))

    Args:
        N: Number of sectors, N >= 3
        zeta: Complex rapidity difference (scalar or array)

    Raises:
        PoleProximity: within 1e-12 of the pole 2 pi i / N (mod 2 pi i)
    """
    if N < 3:
        raise InvalidParameter(f"S^11 closed form needs N >= 3, got {N}")
    x = TWO_PI / N
    z = np.asarray(zeta, dtype=complex)
    distance, pole = _nearest_singularity(z, -x)
    close = distance < POLE_RADIUS
    if np.any(close):
        raise PoleProximity(complex(np.atleast_1d(pole)[np.argmax(np.atleast_1d(close))]))
    value = np.sinh(0.5 * (z + 1j * x)) / np.sinh(0.5 * (z - 1j * x))
    return complex(value) if np.ndim(zeta) == 0 else value


class SMatrixModel:
    """
    Z(N)-Ising S-matrix with all components built from S^{11} by the bootstrap

    Components are cached with their pole registries. `perturb` adds a
    constant to every evaluated component (negative control only); the
    exact factor data is kept underneath.
    """

    def __init__(self, N: int, m1: float = 1.0, perturb: complex = 0.0, build: bool = True):
        if N < 2:
            raise InvalidParameter(f"N must be >= 2, got {N}")
        self.N = N
        self.spectrum: MassSpectrum = spectrum_for(N, m1)
        self.perturb = complex(perturb)
        self.angles: Dict[Tuple[int, int], FusionAngles] = self._solve_angles()
        self._exact: Dict[Tuple[int, int], SComponent] = {}
        self.components: Dict[Tuple[int, int], SComponent] = {}
        if build:
            self._build()

    @classmethod
    def pole_free(cls, N: int, m1: float = 1.0, value: int = 1) -> 'SMatrixModel':
        """Model whose every component is the constant `value` (free or Ising-like)"""
        model = cls(N, m1, build=False)
        for alpha in model.types:
            for beta in model.types:
                model._store(SComponent.constant(alpha, beta, N, value))
        return model

    @property
    def types(self) -> range:
        return range(1, self.N)

    def antiparticle(self, alpha: int) -> int:
        return self.N - alpha

    def fusion_product(self, alpha: int, beta: int) -> Optional[int]:
        gamma = (alpha + beta) % self.N
        return gamma or None

    def _solve_angles(self) -> Dict[Tuple[int, int], FusionAngles]:
        angles = {}
        for alpha in self.types:
            for beta in self.types:
                gamma = self.fusion_product(alpha, beta)
                if gamma is None:
                    continue
                angles[(alpha, beta)] = solve_fusion_angles(
                    self.spectrum.mass(alpha), self.spectrum.mass(beta), self.spectrum.mass(gamma))
        return angles

    def channel_of(self, alpha: int, beta: int, location: complex) -> str:
        """Label a strip pole of S^{alpha beta} as s- or t-channel"""
        u = complex(location).imag
        direct = self.angles.get((alpha, beta))
        if direct is not None and abs(direct.theta_sum - u) <= 1e-8:
            return 's'
        crossed = self.angles.get((self.antiparticle(beta), alpha))
        if crossed is not None and abs(PI - u - crossed.theta_sum) <= 1e-8:
            return 't'
        return ''

    def _channel_labeler(self, alpha: int, beta: int) -> Callable[[complex], str]:
        return lambda location: self.channel_of(alpha, beta, location)

    def _store(self, component: SComponent):
        key = (component.alpha, component.beta)
        self._exact[key] = component
        self.components[key] = (component.with_perturbation(self.perturb)
                                if self.perturb else component)

    def _build(self):
        N = self.N
        x = TWO_PI / N
        self._store(SComponent.from_factors(1, 1, N, [x], [-x],
                                            channel_of=self._channel_labeler(1, 1)))
        # S^{1 gamma} through (1, gamma - 1) -> gamma
        for gamma in range(2, N):
            self._store(bootstrap_component(self, 1, (1, gamma - 1, gamma)))
        for delta in range(2, N):
            seed = self._exact[(1, delta)]
            self._store(SComponent.from_factors(delta, 1, N, seed.numerator, seed.denominator,
                                                seed.sign, self._channel_labeler(delta, 1)))
            for gamma in range(2, N):
                self._store(bootstrap_component(self, delta, (1, gamma - 1, gamma)))
        logger.debug(f"built {len(self.components)} S-matrix components for N={N}")

    def component(self, alpha: int, beta: int) -> SComponent:
        try:
            return self.components[(alpha, beta)]
        except KeyError:
            raise DependencyMissing(f"S^{{{alpha}{beta}}} has not been constructed")

    def exact_component(self, alpha: int, beta: int) -> SComponent:
        try:
            return self._exact[(alpha, beta)]
        except KeyError:
            raise DependencyMissing(f"S^{{{alpha}{beta}}} has not been constructed")

    def evaluate(self, alpha: int, beta: int, zeta):
        return self.component(alpha, beta)(zeta)


def bootstrap_component(model: SMatrixModel, delta: int, process: Tuple[int, int, int],
                        shifts: Optional[Tuple[float, float]] = None) -> SComponent:
    """
    Build S^{delta gamma} from the fusion (alpha, beta) -> gamma

    S^{delta gamma}(zeta) = S^{delta alpha}(zeta - i theta_ab) * S^{delta beta}(zeta + i theta_ba)

    Args:
        model: Model holding the constituent components and fusion angles
        delta: Spectator particle type
        process: (alpha, beta, gamma)
        shifts: Override of (theta_ab, theta_ba), e.g. (0, 0) for the plain product

    Returns:
        The exact (unperturbed) component with its pole registry
    """
    alpha, beta, gamma = process
    missing = [key for key in ((delta, alpha), (delta, beta)) if key not in model._exact]
    if missing:
        raise DependencyMissing(f"cannot build S^{{{delta}{gamma}}}: missing {missing}")
    if shifts is None:
        angles = model.angles.get((alpha, beta))
        if angles is None:
            raise DependencyMissing(f"no fusion angles for ({alpha}, {beta}) -> {gamma}")
        shifts = (angles.theta_ab, angles.theta_ba)
    theta_ab, theta_ba = shifts

    left = model._exact[(delta, alpha)]
    right = model._exact[(delta, beta)]
    num_l, den_l = left.shifted(-theta_ab)
    num_r, den_r = right.shifted(theta_ba)
    return SComponent.from_factors(
        delta, gamma, model.N,
        num_l + num_r, den_l + den_r,
        left.sign * right.sign,
        model._channel_labeler(delta, gamma),
    )


def real_grid(points: int = 100, extent: float = 5.0) -> np.ndarray:
    return np.linspace(-extent, extent, points)


def strip_grid(component_poles: Iterable[complex] = (), exclusion: float = 0.05,
               re_points: int = 21, im_points: int = 13, extent: float = 2.5) -> np.ndarray:
    """Complex grid inside the physical strip with pole neighbourhoods removed"""
    re = np.linspace(-extent, extent, re_points)
    im = np.linspace(0.1, PI - 0.1, im_points)
    grid = (re[None, :] + 1j * im[:, None]).ravel()
    keep = np.ones(grid.shape, dtype=bool)
    for pole in component_poles:
        keep &= np.abs(grid - pole) > exclusion
    return grid[keep]


def check_unitarity(c: SComponent, grid: Optional[np.ndarray] = None) -> AxiomReport:
    """
    S(theta) S(-theta) = 1 and |S(theta)| = 1 on a real grid

    Returns:
        Report passing iff both maxima are below 1e-10
    """
    theta = real_grid() if grid is None else np.asarray(grid, dtype=float)
    values = c(theta)
    mirrored = c(-theta)
    product_error = float(np.max(np.abs(values * mirrored - 1.0)))
    modulus_error = float(np.max(np.abs(np.abs(values) - 1.0)))
    worst = max(product_error, modulus_error)
    return AxiomReport(
        check='unitarity', target=c.label, max_error=worst, tolerance=UNITARITY_TOL,
        passed=bool(worst < UNITARITY_TOL), points=int(theta.size),
        details={'product_error': product_error, 'modulus_error': modulus_error},
    )


def check_crossing(model: SMatrixModel, alpha: int, beta: int,
                   grid: Optional[np.ndarray] = None) -> AxiomReport:
    """
    Compare S^{alpha beta}(i pi - zeta) with S^{bar beta alpha}(zeta) on a strip grid
    """
    beta_bar = model.antiparticle(beta)
    direct = model.component(alpha, beta)
    crossed = model.component(beta_bar, alpha)
    if grid is None:
        excluded = [1j * PI - p.location for p in direct.poles]
        excluded += [p.location for p in crossed.poles]
        grid = strip_grid(excluded)
    zeta = np.asarray(grid, dtype=complex)
    difference = np.abs(direct(1j * PI - zeta) - crossed(zeta))
    worst = float(np.max(difference)) if difference.size else 0.0
    return AxiomReport(
        check='crossing', target=f"S^{{{alpha}{beta}}} vs S^{{{beta_bar}{alpha}}}",
        max_error=worst, tolerance=CROSSING_TOL, passed=bool(worst < CROSSING_TOL),
        points=int(zeta.size),
    )


def _sup_difference(a: SComponent, b: SComponent, grid: Optional[np.ndarray]) -> Tuple[float, int]:
    if grid is None:
        grid = strip_grid([p.location for p in a.poles] + [p.location for p in b.poles])
    zeta = np.asarray(grid, dtype=complex)
    return float(np.max(np.abs(a(zeta) - b(zeta)))), int(zeta.size)


def check_path_independence(model: SMatrixModel,
                            grid: Optional[np.ndarray] = None) -> List[AxiomReport]:
    """
    Rebuild every component through each admissible fusion decomposition
    and compare with the stored one; also compare S^{ab} with S^{ba}
    """
    reports = []
    for (delta, gamma), stored in sorted(model._exact.items()):
        for (alpha, beta) in sorted(model.angles):
            if model.fusion_product(alpha, beta) != gamma:
                continue
            if (delta, alpha) not in model._exact or (delta, beta) not in model._exact:
                continue
            rebuilt = bootstrap_component(model, delta, (alpha, beta, gamma))
            worst, points = _sup_difference(stored, rebuilt, grid)
            reports.append(AxiomReport(
                check='bootstrap', target=f"S^{{{delta}{gamma}}} via ({alpha},{beta})",
                max_error=worst, tolerance=PATH_TOL, passed=bool(worst < PATH_TOL), points=points,
            ))
    return reports


def check_symmetries(model: SMatrixModel, grid: Optional[np.ndarray] = None) -> List[AxiomReport]:
    """Parity S^{ab} = S^{ba} and charge conjugation S^{ab} = S^{bar a bar b} on the real line"""
    theta = real_grid() if grid is None else np.asarray(grid, dtype=float)
    reports = []
    for (alpha, beta), c in sorted(model.components.items()):
        if alpha > beta:
            continue
        parity = model.component(beta, alpha)
        conj = model.component(model.antiparticle(alpha), model.antiparticle(beta))
        for check, other in (('parity', parity), ('charge_conjugation', conj)):
            worst = float(np.max(np.abs(c(theta) - other(theta))))
            reports.append(AxiomReport(
                check=check, target=f"{c.label} vs {other.label}", max_error=worst,
                tolerance=SYMMETRY_TOL, passed=bool(worst < SYMMETRY_TOL), points=int(theta.size),
            ))
    return reports


# Pole search

DEFAULT_STRIP_REGION = (-0.7071, 0.6931, 0.01234, PI - 0.01357)
MAX_BOUNDARY_POINTS = 1 << 14
MAX_SUBDIVISION_DEPTH = 4


def _rectangle_boundary(x0: float, x1: float, y0: float, y1: float, per_edge: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    return np.concatenate([
        x0 + (x1 - x0) * t + 1j * y0,
        x1 + 1j * (y0 + (y1 - y0) * t),
        x1 - (x1 - x0) * t + 1j * y1,
        x0 + 1j * (y1 - (y1 - y0) * t),
    ])


def winding_number(c: SComponent, rectangle: Tuple[float, float, float, float],
                   per_edge: int = 64) -> int:
    """
    Winding number of S around a rectangle (zeros minus poles inside)

    Boundary points double until no phase step exceeds 0.5 rad.
    """
    while True:
        path = _rectangle_boundary(*rectangle, per_edge)
        values = c.evaluate_raw(np.append(path, path[0]))
        if not np.all(np.isfinite(values)) or np.any(values == 0):
            raise ContourConflict(f"{c.label}: singularity on rectangle boundary {rectangle}")
        steps = np.angle(values[1:] / values[:-1])
        total = float(np.sum(steps)) / TWO_PI
        if np.max(np.abs(steps)) <= 0.5 and abs(total - round(total)) < 0.1:
            return int(round(total))
        if per_edge >= MAX_BOUNDARY_POINTS:
            raise ContourConflict(f"{c.label}: phase not resolved on {rectangle}")
        per_edge *= 2


def _refine_pole(c: SComponent, start: complex, order: int,
                 rectangle: Tuple[float, float, float, float]) -> complex:
    # Newton on 1/S with a central-difference derivative
    h = 1e-7
    x0, x1, y0, y1 = rectangle
    margin = 0.5 * max(x1 - x0, y1 - y0)

    def inverse(z):
        return 1.0 / complex(c.evaluate_raw(z))

    z = complex(start)
    for _ in range(60):
        g = inverse(z)
        derivative = (inverse(z + h) - inverse(z - h)) / (2 * h)
        if derivative == 0 or not np.isfinite(derivative):
            break
        step = order * g / derivative
        z -= step
        if not (x0 - margin <= z.real <= x1 + margin and y0 - margin <= z.imag <= y1 + margin):
            break
        if abs(step) < 1e-12:
            return z
    raise PoleRefinementFailure(f"{c.label}: Newton refinement from {start} did not converge")


def _scan(c: SComponent, rectangle, depth: int, found: List[Tuple[complex, int]]):
    w = winding_number(c, rectangle)
    if w == 0:
        return
    x0, x1, y0, y1 = rectangle
    small = max(x1 - x0, y1 - y0) < 0.1
    if depth >= MAX_SUBDIVISION_DEPTH or small:
        if w < 0:
            center = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
            found.append((_refine_pole(c, center, -w, rectangle), -w))
        return
    xm, ym = 0.5 * (x0 + x1) + 1.234e-4, 0.5 * (y0 + y1) - 2.345e-4
    for sub in ((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)):
        _scan(c, sub, depth + 1, found)


def locate_poles(c: SComponent, strip_region: Optional[Tuple[float, float, float, float]] = None,
                 bands: int = 7) -> List[complex]:
    """
    Find poles of a component by argument-principle counting

    Args:
        c: Component to scan
        strip_region: (re_min, re_max, im_min, im_max) inside the open strip
        bands: Number of horizontal bands the region is first split into

    Returns:
        Refined pole locations (accurate to about 1e-8), sorted by imaginary part
    """
    x0, x1, y0, y1 = strip_region or DEFAULT_STRIP_REGION
    edges = np.linspace(y0, y1, bands + 1)
    found: List[Tuple[complex, int]] = []
    for lower, upper in zip(edges[:-1], edges[1:]):
        _scan(c, (x0, x1, float(lower), float(upper)), 0, found)

    poles: List[complex] = []
    for location, _ in found:
        if not any(abs(location - p) < 1e-7 for p in poles):
            poles.append(location)
    logger.debug(f"{c.label}: located poles {poles}")
    return sorted(poles, key=lambda p: (p.imag, p.real))


def residue_at(c: SComponent, pole: complex, tol: float = 1e-10) -> complex:
    """
    Contour residue (1/2 pi i) of S on a circle around a registered pole

    The radius is min(0.1, half the distance to the nearest other
    singularity); the trapezoidal rule doubles until two successive sums agree.

    Raises:
        ContourConflict: unregistered pole, or no admissible radius >= 1e-3
    """
    z0 = complex(pole)
    if not any(abs(p.location - z0) < 1e-8 for p in c.poles):
        raise ContourConflict(f"{c.label}: {z0} is not a registered pole")
    others = [s for s in c.singularities() if abs(s - z0) > 1e-8]
    radius = 0.1
    if others:
        radius = min(radius, 0.5 * min(abs(s - z0) for s in others))
    if radius < 1e-3:
        raise ContourConflict(f"{c.label}: another pole within {2 * radius:.2e} of {z0}")

    def trapezoid(points: int) -> complex:
        phi = TWO_PI * np.arange(points) / points
        offsets = radius * np.exp(1j * phi)
        return complex(np.mean(c.evaluate_raw(z0 + offsets) * offsets))

    points = 64
    previous = trapezoid(points)
    while points < 8192:
        points *= 2
        current = trapezoid(points)
        if abs(current - previous) <= tol * max(1.0, abs(current)):
            return current
        previous = current
    raise QuadratureError(f"{c.label}: residue contour did not converge at {z0}",
                          abs(current - previous))


def export_pole_rows(model: SMatrixModel, pairs: Optional[Iterable[Tuple[int, int]]] = None) -> List[dict]:
    """Pole/residue rows of the requested components (all by default)"""
    rows = []
    keys = sorted(model.components) if pairs is None else list(pairs)
    for alpha, beta in keys:
        c = model.component(alpha, beta)
        for p in c.poles:
            if not 0 < p.location.imag < PI:
                continue
            residue = residue_at(c, p.location) if p.order == 1 else complex('nan')
            rows.append({
                'N': model.N,
                'alpha': alpha,
                'beta': beta,
                'pole_re': p.location.real,
                'pole_im': p.location.imag,
                'channel': p.channel or 'none',
                'residue_re': residue.real,
                'residue_im': residue.imag,
            })
    return rows
