"""
Wedge-localized test functions and their on-shell transforms

A test function assigns to each particle type a finite sum of smooth disc
bumps A * exp(-1 / (1 - |x - c|^2 / r^2)). Its on-shell transforms

    f^{+/-}_alpha(zeta) = (1 / 2 pi) * integral f_alpha(x) exp(+/- i p(zeta).x) d^2x

with p(zeta) = m (cosh zeta, sinh zeta) and p.x = p0 x0 - p1 x1 are entire in
zeta. Two evaluation methods are available: an exact radial reduction to a
Bessel J0 integral (default) and a tensor Gauss-Legendre rule over the
bounding box of each disc.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from scipy.special import jve

from ..core.errors import InvalidParameter, QuadratureError
from .quadrature import doubling_orders, gauss_legendre

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
RADIAL_START_ORDER = 32
TENSOR_START_ORDER = 16
TENSOR_ORDER_MAX = 512
CHUNK = 256


@dataclass(frozen=True)
class Bump:
    """Smooth bump on the disc |x - center| < radius"""
    center: Tuple[float, float]
    radius: float
    amplitude: complex = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidParameter(f"bump radius must be positive, got {self.radius}")
        object.__setattr__(self, 'center', (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, 'amplitude', complex(self.amplitude))

    def __call__(self, x0, x1):
        s2 = ((np.asarray(x0) - self.center[0]) ** 2 + (np.asarray(x1) - self.center[1]) ** 2) / self.radius ** 2
        inside = s2 < 1.0
        with np.errstate(divide='ignore', over='ignore'):
            profile = np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - s2, 1.0)), 0.0)
        return self.amplitude * profile

    def integral(self) -> complex:
        """Integral of the bump over the plane"""
        return self.amplitude * 2.0 * math.pi * self.radius ** 2 * _unit_radial_moment()

    def abs_integral(self) -> float:
        return abs(self.amplitude) * 2.0 * math.pi * self.radius ** 2 * _unit_radial_moment()

    def to_dict(self) -> dict:
        return {
            'center': list(self.center),
            'radius': self.radius,
            'amplitude': [self.amplitude.real, self.amplitude.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Bump':
        return cls(tuple(data['center']), data['radius'], complex(*data['amplitude']))


@lru_cache(maxsize=1)
def _unit_radial_moment() -> float:
    # integral_0^1 exp(-1/(1 - s^2)) s ds
    x, w = gauss_legendre(200)
    s = 0.5 * (x + 1.0)
    return float(0.5 * np.sum(w * np.exp(-1.0 / (1.0 - s ** 2)) * s))


@dataclass(frozen=True)
class Wedge:
    """
    Right wedge {x : x1 > |x0|} + translation, or the left wedge (its negative)
    """
    side: str
    translation: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.side not in ('left', 'right'):
            raise InvalidParameter(f"wedge side must be 'left' or 'right', got {self.side!r}")
        object.__setattr__(self, 'translation', (float(self.translation[0]), float(self.translation[1])))

    def distance_to_boundary(self, point: Tuple[float, float]) -> float:
        """Signed Euclidean distance to the wedge boundary (positive inside)"""
        y0 = point[0] - self.translation[0]
        y1 = point[1] - self.translation[1]
        if self.side == 'right':
            return (y1 - abs(y0)) / SQRT2
        return (-y1 - abs(y0)) / SQRT2

    def contains_disc(self, center: Tuple[float, float], radius: float, margin: float = 0.0) -> bool:
        """
        True if the closed Euclidean disc keeps more than `margin` from the boundary

        A disc centred at (0, h) fits the right wedge iff radius + margin < h / sqrt2.
        """
        return self.distance_to_boundary(center) > radius + margin

    def translated(self, shift: Tuple[float, float]) -> 'Wedge':
        return Wedge(self.side, (self.translation[0] + shift[0], self.translation[1] + shift[1]))

    def spacelike_to(self, other: 'Wedge') -> bool:
        """True if a left and a right wedge are spacelike separated"""
        if {self.side, other.side} != {'left', 'right'}:
            return False
        left, right = (self, other) if self.side == 'left' else (other, self)
        d0 = right.translation[0] - left.translation[0]
        d1 = right.translation[1] - left.translation[1]
        return d1 >= abs(d0)


@dataclass(frozen=True)
class TestFunction:
    """
    Test function with one bump sum per particle type

    `components` is stored as a sorted tuple so instances are hashable;
    use `by_type` for lookup.
    """
    __test__ = False

    N: int
    components: Tuple[Tuple[int, Tuple[Bump, ...]], ...] = ()
    name: str = ''

    @classmethod
    def from_mapping(cls, N: int, components: Mapping[int, Iterable[Bump]], name: str = '') -> 'TestFunction':
        for alpha in components:
            if not 1 <= alpha <= N - 1:
                raise InvalidParameter(f"particle type {alpha} outside 1..{N - 1}")
        stored = tuple(sorted((int(alpha), tuple(bumps)) for alpha, bumps in components.items() if tuple(bumps)))
        return cls(N, stored, name)

    @classmethod
    def zero(cls, N: int, name: str = '') -> 'TestFunction':
        return cls(N, (), name)

    @property
    def by_type(self) -> Dict[int, Tuple[Bump, ...]]:
        return dict(self.components)

    @property
    def types(self) -> List[int]:
        return [alpha for alpha, _ in self.components]

    def bumps(self) -> List[Bump]:
        return [bump for _, bumps in self.components for bump in bumps]

    def __call__(self, alpha: int, x0, x1):
        total = 0j
        for bump in self.by_type.get(alpha, ()):
            total = total + bump(x0, x1)
        return total

    def scaled(self, factor: complex) -> 'TestFunction':
        return TestFunction.from_mapping(self.N, {
            alpha: [Bump(b.center, b.radius, factor * b.amplitude) for b in bumps]
            for alpha, bumps in self.components
        }, self.name)

    def __add__(self, other: 'TestFunction') -> 'TestFunction':
        if other.N != self.N:
            raise InvalidParameter("cannot add test functions of different N")
        merged: Dict[int, List[Bump]] = {}
        for alpha, bumps in self.components + other.components:
            merged.setdefault(alpha, []).extend(bumps)
        return TestFunction.from_mapping(self.N, merged, self.name or other.name)

    def translated(self, shift: Tuple[float, float]) -> 'TestFunction':
        return TestFunction.from_mapping(self.N, {
            alpha: [Bump((b.center[0] + shift[0], b.center[1] + shift[1]), b.radius, b.amplitude) for b in bumps]
            for alpha, bumps in self.components
        }, self.name)

    def l1_norm(self, alpha: int) -> float:
        return sum(b.abs_integral() for b in self.by_type.get(alpha, ()))

    def to_dict(self) -> dict:
        return {
            'N': self.N,
            'name': self.name,
            'components': {str(alpha): [b.to_dict() for b in bumps] for alpha, bumps in self.components},
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'TestFunction':
        return cls.from_mapping(data['N'], {
            int(alpha): [Bump.from_dict(b) for b in bumps] for alpha, bumps in data['components'].items()
        }, data.get('name', ''))


def wedge_support_check(f: TestFunction, wedge: Wedge, margin: float = 0.0) -> bool:
    """
    True iff every support disc of f lies strictly inside the wedge

    Args:
        f: Test function
        wedge: Target wedge
        margin: Extra distance required from the wedge boundary
    """
    return all(wedge.contains_disc(b.center, b.radius, margin) for b in f.bumps())


def cpt_partner(f: TestFunction) -> TestFunction:
    """Component alpha of the result at x is conj(f_{bar alpha}(-x))"""
    return TestFunction.from_mapping(f.N, {
        f.N - alpha: [Bump((-b.center[0], -b.center[1]), b.radius, b.amplitude.conjugate()) for b in bumps]
        for alpha, bumps in f.components
    }, f.name)


def charge_conjugate(f: TestFunction) -> TestFunction:
    """Component alpha of the result at x is conj(f_{bar alpha}(x))"""
    return TestFunction.from_mapping(f.N, {
        f.N - alpha: [Bump(b.center, b.radius, b.amplitude.conjugate()) for b in bumps]
        for alpha, bumps in f.components
    }, f.name)


def _momentum(mass: float, zeta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return mass * np.cosh(zeta), mass * np.sinh(zeta)


def _radial_chunk(bump: Bump, sign: int, mass: float, zeta: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Radial-reduction sum for one bump at one order: (values, L1 sizes)"""
    x, w = gauss_legendre(n)
    s = 0.5 * (x + 1.0)
    rho = bump.radius * s
    weights = 0.5 * bump.radius * w * rho
    p0, p1 = _momentum(mass, zeta)
    kappa = mass * np.sqrt(np.cosh(2.0 * zeta))
    phase = sign * 1j * (p0 * bump.center[0] - p1 * bump.center[1])
    arg = kappa[:, None] * rho[None, :]
    # jve(0, z) = J0(z) exp(-|Im z|); exponents are recombined to avoid overflow
    exponent = np.abs(arg.imag) - 1.0 / (1.0 - s[None, :] ** 2) + phase[:, None]
    terms = weights[None, :] * jve(0, arg) * np.exp(exponent)
    values = bump.amplitude * np.sum(terms, axis=1)
    sizes = abs(bump.amplitude) * np.sum(np.abs(terms), axis=1)
    return values, sizes


def _radial_transform(bump: Bump, sign: int, mass: float, zeta: np.ndarray,
                      tol: float, order_max: int) -> np.ndarray:
    result = np.empty(zeta.shape, dtype=complex)
    orders = doubling_orders(RADIAL_START_ORDER, order_max)
    for start in range(0, zeta.size, CHUNK):
        chunk = zeta[start:start + CHUNK]
        pending = np.arange(chunk.size)
        previous, _ = _radial_chunk(bump, sign, mass, chunk, orders[0])
        error = np.full(chunk.size, np.inf)
        for n in orders[1:]:
            values, sizes = _radial_chunk(bump, sign, mass, chunk[pending], n)
            error[pending] = np.abs(values - previous[pending])
            previous[pending] = values
            done = error[pending] <= tol * np.maximum(sizes, 1e-300)
            pending = pending[~done]
            if pending.size == 0:
                break
        if pending.size:
            worst = float(np.max(error[pending]))
            raise QuadratureError(
                f"radial on-shell transform not converged at order {orders[-1]} "
                f"for zeta = {chunk[pending[0]]}", worst)
        result[start:start + CHUNK] = previous
    return result


def _tensor_value(bump: Bump, sign: int, mass: float, zeta: complex, n: int) -> Tuple[complex, float]:
    x, w = gauss_legendre(n)
    r = bump.radius
    x0 = bump.center[0] + r * x
    x1 = bump.center[1] + r * x
    X0, X1 = np.meshgrid(x0, x1, indexing='ij')
    W = (r * w)[:, None] * (r * w)[None, :]
    p0, p1 = _momentum(mass, np.asarray(zeta))
    integrand = bump(X0, X1) * np.exp(sign * 1j * (p0 * X0 - p1 * X1))
    terms = W * integrand
    return complex(np.sum(terms)) / (2.0 * math.pi), float(np.sum(np.abs(terms))) / (2.0 * math.pi)


def _tensor_transform(bump: Bump, sign: int, mass: float, zeta: np.ndarray, tol: float) -> np.ndarray:
    out = np.empty(zeta.shape, dtype=complex)
    orders = doubling_orders(TENSOR_START_ORDER, TENSOR_ORDER_MAX)
    for k, z in enumerate(zeta):
        previous, _ = _tensor_value(bump, sign, mass, complex(z), orders[0])
        for n in orders[1:]:
            value, size = _tensor_value(bump, sign, mass, complex(z), n)
            error = abs(value - previous)
            previous = value
            if error <= tol * max(size, 1e-300):
                break
        else:
            raise QuadratureError(f"tensor on-shell transform not converged at zeta = {z}", error)
        out[k] = previous
    return out


def onshell_transform(f: TestFunction, alpha: int, sign: int, zeta, mass: float = 1.0,
                      method: str = 'hankel', tol: float = 1e-9, order_max: int = 2048):
    """
    On-shell transform f^{sign}_alpha(zeta)

    Args:
        f: Test function
        alpha: Particle type
        sign: +1 or -1
        zeta: Complex rapidity (scalar or array)
        mass: Mass of particle type alpha
        method: 'hankel' (radial Bessel reduction) or 'tensor' (2D Gauss-Legendre)
        tol: Relative tolerance between successive orders
        order_max: Largest radial order

    Returns:
        Complex value(s); zero if f has no alpha component
    """
    if sign not in (1, -1):
        raise InvalidParameter(f"sign must be +1 or -1, got {sign}")
    if method not in ('hankel', 'tensor'):
        raise InvalidParameter(f"unknown transform method {method!r}")
    z = np.atleast_1d(np.asarray(zeta, dtype=complex)).ravel()
    total = np.zeros(z.shape, dtype=complex)
    for bump in f.by_type.get(alpha, ()):
        if method == 'hankel':
            total += _radial_transform(bump, sign, mass, z, tol, order_max)
        else:
            total += _tensor_transform(bump, sign, mass, z, tol)
    if np.ndim(zeta) == 0:
        return complex(total[0])
    return total.reshape(np.shape(zeta))


class OnShellFunction:
    """
    f^{sign}_alpha as a callable of complex rapidity, with a value cache

    The cache is keyed by the raw bytes of the argument array, so repeated
    evaluation on a fixed quadrature grid costs one transform.
    """

    def __init__(self, f: TestFunction, alpha: int, sign: int, mass: float = 1.0,
                 method: str = 'hankel', tol: float = 1e-9, order_max: int = 2048):
        self.f = f
        self.alpha = alpha
        self.sign = sign
        self.mass = mass
        self.method = method
        self.tol = tol
        self.order_max = order_max
        self._cache: Dict[Tuple[bytes, Tuple[int, ...]], np.ndarray] = {}

    def __call__(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        key = (z.tobytes(), z.shape)
        cached = self._cache.get(key)
        if cached is None:
            cached = np.asarray(onshell_transform(self.f, self.alpha, self.sign, z, self.mass,
                                                  self.method, self.tol, self.order_max))
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[key] = cached
        if z.ndim == 0:
            return complex(cached)
        return cached

    def bound(self) -> float:
        """Bound on |f^{sign}| in the half strip where the wedge makes it decay"""
        return self.f.l1_norm(self.alpha) / (2.0 * math.pi)

    def to_dict(self) -> dict:
        return {
            'test_function': self.f.to_dict(),
            'alpha': self.alpha,
            'sign': self.sign,
            'mass': self.mass,
            'method': self.method,
        }


def transform_rows(f: TestFunction, masses: Mapping[int, float], grid: Iterable[float]) -> List[dict]:
    """Rows (type, sign, theta, re, im) of f^{+/-} on a real rapidity grid"""
    theta = np.asarray(list(grid), dtype=float)
    rows = []
    for alpha in f.types:
        for sign in (1, -1):
            values = onshell_transform(f, alpha, sign, theta, masses.get(alpha, 1.0))
            for t, v in zip(theta, values):
                rows.append({'type': alpha, 'sign': '+' if sign > 0 else '-',
                             'theta': float(t), 're': float(v.real), 'im': float(v.imag)})
    return rows
