"""
Truncated S-symmetric Fock space with Zamolodchikov-Faddeev operators

Vectors carry closed-form wavefunctions that are evaluated lazily at
complex rapidities, so the complex shifts of the bound-state operator act
on exact analytic continuations rather than on grid data.

Conventions:
    two-particle symmetry   Phi^{ab}(t1, t2) = S^{ba}(t2 - t1) Phi^{ba}(t2, t1)
    creation                z+(h) psi = (1/sqrt2) [h_a(t1) psi_b(t2) + S^{ba}(t2 - t1) h_b(t2) psi_a(t1)]
    contraction             (z(K) Phi)^b(t) = sqrt2 sum_a int K_a(s) Phi^{ab}(s, t) ds
    field                   phi(f) = z+(f^+) + z(K),  K_a = f^-_{bar a}
    CPT                     (J psi)_a(z) = conj psi_{bar a}(conj z)
                            (J Phi)^{ab}(z1, z2) = conj Phi^{bar b bar a}(conj z2, conj z1)
    reflected operators     phi'(g) = J phi(cpt_partner(g)) J,  chi'(g) = J chi(cpt_partner(g)) J
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DependencyMissing, DomainError, QuadratureError, RequestError
from ..core.smatrix import SComponent, SMatrixModel
from .quadrature import adaptive_sum, doubling_orders, hermite_rule, sinh_rule
from .testfn import OnShellFunction, TestFunction, cpt_partner

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
EVAL_CHUNK = 1 << 21
MARGIN_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSettings:
    """Quadrature controls shared by all Fock-space integrals"""
    level: int = 1
    tol: float = 1e-9
    radial_order_max: int = 2048
    hermite_order_max: int = 256
    method: str = 'hankel'


# Wavefunctions

class Wavefunction:
    """
    Lazily evaluated analytic wavefunction of one or two rapidities

    `poles()` lists imaginary offsets where the function is singular: of
    the argument for one-variable functions, of t2 - t1 for two-variable ones.
    """
    arity = 1

    def __call__(self, *args):
        raise NotImplementedError

    def envelope(self) -> Optional[Tuple[float, float]]:
        return None

    def poles(self) -> Tuple[float, ...]:
        return ()

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianTerm:
    coefficient: complex
    a: float
    theta0: float
    power: int = 0


class GaussianWavefunction(Wavefunction):
    """Finite sum of c * exp(-a (t - t0)^2) * t^k"""

    def __init__(self, terms: Iterable[GaussianTerm]):
        self.terms = tuple(terms)
        for term in self.terms:
            if not term.a > 0:
                raise RequestError(f"Gaussian width parameter must be positive, got {term.a}")

    @classmethod
    def single(cls, a: float, theta0: float, coefficient: complex = 1.0) -> 'GaussianWavefunction':
        return cls([GaussianTerm(complex(coefficient), float(a), float(theta0))])

    def __call__(self, theta):
        z = np.asarray(theta, dtype=complex)
        total = np.zeros(z.shape, dtype=complex)
        for term in self.terms:
            value = term.coefficient * np.exp(-term.a * (z - term.theta0) ** 2)
            if term.power:
                value = value * z ** term.power
            total = total + value
        return total

    def envelope(self):
        if not self.terms:
            return None
        if len(self.terms) == 1:
            return (self.terms[0].theta0, self.terms[0].a)
        center = float(np.mean([t.theta0 for t in self.terms]))
        return (center, 0.5 * min(t.a for t in self.terms))

    def to_dict(self):
        return {
            'kind': 'gaussian',
            'terms': [
                {'c': [t.coefficient.real, t.coefficient.imag], 'a': t.a, 'theta0': t.theta0, 'k': t.power}
                for t in self.terms
            ],
        }


class OnShellWavefunction(Wavefunction):
    """coefficient * f^{sign}_alpha(t)"""

    def __init__(self, transform: OnShellFunction, coefficient: complex = 1.0):
        self.transform = transform
        self.coefficient = complex(coefficient)

    def __call__(self, theta):
        return self.coefficient * self.transform(theta)

    def to_dict(self):
        return {'kind': 'onshell', 'coefficient': [self.coefficient.real, self.coefficient.imag],
                **self.transform.to_dict()}


class SumWavefunction(Wavefunction):
    """Linear combination of wavefunctions of equal arity"""

    def __init__(self, parts: Sequence[Wavefunction], coefficients: Optional[Sequence[complex]] = None):
        self.parts = tuple(parts)
        self.coefficients = tuple(complex(c) for c in (coefficients or [1.0] * len(self.parts)))
        self.arity = self.parts[0].arity if self.parts else 1

    def __call__(self, *args):
        total = 0j
        for c, part in zip(self.coefficients, self.parts):
            total = total + c * part(*args)
        return total

    def envelope(self):
        envelopes = [p.envelope() for p in self.parts]
        if not envelopes or any(e is None for e in envelopes):
            return None
        if len(envelopes) == 1:
            return envelopes[0]
        return (float(np.mean([e[0] for e in envelopes])), 0.5 * min(e[1] for e in envelopes))

    def poles(self):
        return tuple(sorted({q for p in self.parts for q in p.poles()}))

    def to_dict(self):
        return {
            'kind': 'sum',
            'coefficients': [[c.real, c.imag] for c in self.coefficients],
            'parts': [p.to_dict() for p in self.parts],
        }


class ShiftedProduct(Wavefunction):
    """coefficient * prod_k w_k(t + i s_k)"""

    def __init__(self, factors: Sequence[Tuple[Wavefunction, float]], coefficient: complex = 1.0):
        self.factors = tuple((w, float(s)) for w, s in factors)
        self.coefficient = complex(coefficient)

    def __call__(self, theta):
        z = np.asarray(theta, dtype=complex)
        value = np.full(z.shape, self.coefficient)
        for w, s in self.factors:
            value = value * w(z + 1j * s)
        return value

    def envelope(self):
        # |exp(-a (t + i s - t0)^2)| keeps the real envelope
        for w, _ in self.factors:
            env = w.envelope()
            if env is not None:
                return env
        return None

    def poles(self):
        return tuple(sorted({q - s for w, s in self.factors for q in w.poles()}))

    def to_dict(self):
        return {
            'kind': 'shifted_product',
            'coefficient': [self.coefficient.real, self.coefficient.imag],
            'factors': [{'shift': s, 'wavefunction': w.to_dict()} for w, s in self.factors],
        }


class Reflected(Wavefunction):
    """conj(w(conj z)); two-variable arguments are also swapped"""

    def __init__(self, inner: Wavefunction):
        self.inner = inner
        self.arity = inner.arity

    def __call__(self, *args):
        if self.arity == 1:
            return np.conj(self.inner(np.conj(np.asarray(args[0], dtype=complex))))
        z1, z2 = (np.asarray(a, dtype=complex) for a in args)
        return np.conj(self.inner(np.conj(z2), np.conj(z1)))

    def envelope(self):
        return self.inner.envelope()

    def poles(self):
        if self.arity == 1:
            return tuple(sorted(-q for q in self.inner.poles()))
        return self.inner.poles()

    def to_dict(self):
        return {'kind': 'reflected', 'inner': self.inner.to_dict()}


class SymmetrizedProduct(Wavefunction):
    """
    (1/sqrt2) [h_a(t1) k_b(t2) + S^{ba}(t2 - t1) h_b(t2) k_a(t1)]

    Missing factors (None) count as zero.
    """
    arity = 2

    def __init__(self, h_a: Optional[Wavefunction], k_b: Optional[Wavefunction],
                 h_b: Optional[Wavefunction], k_a: Optional[Wavefunction], s_ba: SComponent):
        self.h_a, self.k_b, self.h_b, self.k_a = h_a, k_b, h_b, k_a
        self.s_ba = s_ba

    def __call__(self, t1, t2):
        z1 = np.asarray(t1, dtype=complex)
        z2 = np.asarray(t2, dtype=complex)
        total = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        if self.h_a is not None and self.k_b is not None:
            total = total + self.h_a(z1) * self.k_b(z2)
        if self.h_b is not None and self.k_a is not None:
            total = total + self.s_ba.evaluate_raw(z2 - z1) * self.h_b(z2) * self.k_a(z1)
        return total / SQRT2

    def poles(self):
        if self.h_b is None or self.k_a is None:
            return ()
        return tuple(sorted({p.location.imag for p in self.s_ba.poles}))

    def to_dict(self):
        def encode(w):
            return None if w is None else w.to_dict()
        return {
            'kind': 'symmetrized',
            's': [self.s_ba.alpha, self.s_ba.beta],
            'h_a': encode(self.h_a), 'k_b': encode(self.k_b),
            'h_b': encode(self.h_b), 'k_a': encode(self.k_a),
        }


class Contracted(Wavefunction):
    """
    sqrt2 * sum_a int K_a(s) Phi^{a}(s, t) ds on the sinh-mapped grid

    The result is analytic in t away from the imaginary offsets of the
    S-factor poles inside Phi.
    """

    def __init__(self, terms: Sequence[Tuple[Wavefunction, Wavefunction]], level: int):
        self.terms = tuple(terms)
        self.level = level

    def __call__(self, theta):
        z = np.asarray(theta, dtype=complex)
        flat = z.ravel()
        nodes, weights = sinh_rule(self.level)
        out = np.zeros(flat.shape, dtype=complex)
        chunk = max(1, EVAL_CHUNK // nodes.size)
        for kernel, two in self.terms:
            weighted = weights * kernel(nodes)
            for start in range(0, flat.size, chunk):
                block = flat[start:start + chunk]
                values = two(nodes[:, None], block[None, :])
                out[start:start + chunk] += weighted @ values
        return (SQRT2 * out).reshape(z.shape)

    def poles(self):
        return tuple(sorted({q for _, two in self.terms for q in two.poles()}))

    def to_dict(self):
        return {
            'kind': 'contracted',
            'level': self.level,
            'terms': [{'kernel': k.to_dict(), 'two': t.to_dict()} for k, t in self.terms],
        }


def _combine(existing: Optional[Wavefunction], new: Wavefunction, coefficient: complex = 1.0) -> Wavefunction:
    if existing is None:
        return new if coefficient == 1 else SumWavefunction([new], [coefficient])
    return SumWavefunction([existing, new], [1.0, coefficient])


# Vectors

@dataclass(frozen=True)
class FockVector:
    """
    Vector truncated at two particles

    `truncated` records that a component above two particles was dropped.
    """
    N: int
    vacuum: complex = 0j
    one: Mapping[int, Wavefunction] = field(default_factory=dict)
    two: Mapping[Tuple[int, int], Wavefunction] = field(default_factory=dict)
    truncated: bool = False

    def grades(self) -> FrozenSet[int]:
        present = set()
        if self.vacuum != 0:
            present.add(0)
        if self.one:
            present.add(1)
        if self.two:
            present.add(2)
        return frozenset(present)

    @property
    def is_zero(self) -> bool:
        return not self.grades()

    def types(self) -> FrozenSet[int]:
        return frozenset(self.one)

    def __add__(self, other: 'FockVector') -> 'FockVector':
        one = dict(self.one)
        for alpha, w in other.one.items():
            one[alpha] = _combine(one.get(alpha), w)
        two = dict(self.two)
        for key, w in other.two.items():
            two[key] = _combine(two.get(key), w)
        return FockVector(self.N, self.vacuum + other.vacuum, one, two, self.truncated or other.truncated)

    def scaled(self, factor: complex) -> 'FockVector':
        factor = complex(factor)
        return FockVector(
            self.N, factor * self.vacuum,
            {a: SumWavefunction([w], [factor]) for a, w in self.one.items()},
            {k: SumWavefunction([w], [factor]) for k, w in self.two.items()},
            self.truncated,
        )

    def to_dict(self) -> dict:
        return {
            'N': self.N,
            'vacuum': [complex(self.vacuum).real, complex(self.vacuum).imag],
            'one': {str(a): w.to_dict() for a, w in sorted(self.one.items())},
            'two': {f"{a},{b}": w.to_dict() for (a, b), w in sorted(self.two.items())},
            'truncated': self.truncated,
        }


class FockSpace:
    """
    Operators and inner products over a fixed S-matrix model

    Args:
        model: S-matrix model (provides components and masses)
        table: Fusion table with eta coefficients (needed by chi only)
        settings: Quadrature settings
    """

    def __init__(self, model: SMatrixModel, table=None, settings: Optional[QuadratureSettings] = None):
        self.model = model
        self.table = table
        self.settings = settings or QuadratureSettings()
        self.N = model.N
        self._transforms: Dict[Tuple[TestFunction, int, int], OnShellFunction] = {}

    def with_table(self, table) -> 'FockSpace':
        space = FockSpace(self.model, table, self.settings)
        space._transforms = self._transforms
        return space

    def with_settings(self, settings: QuadratureSettings) -> 'FockSpace':
        return FockSpace(self.model, self.table, settings)

    def antiparticle(self, alpha: int) -> int:
        return self.N - alpha

    # construction

    def vacuum(self, coefficient: complex = 1.0) -> FockVector:
        return FockVector(self.N, complex(coefficient))

    def zero(self) -> FockVector:
        return FockVector(self.N)

    def one_particle(self, components: Mapping[int, Wavefunction]) -> FockVector:
        for alpha in components:
            if not 1 <= alpha <= self.N - 1:
                raise RequestError(f"particle type {alpha} outside 1..{self.N - 1}")
        return FockVector(self.N, 0j, dict(components))

    def gaussian_vector(self, components: Mapping[int, Tuple[float, float, complex]]) -> FockVector:
        """One-particle vector from {type: (a, theta0, coefficient)}"""
        return self.one_particle({
            alpha: GaussianWavefunction.single(a, theta0, c) for alpha, (a, theta0, c) in components.items()
        })

    def onshell(self, f: TestFunction, alpha: int, sign: int) -> OnShellFunction:
        key = (f, alpha, sign)
        transform = self._transforms.get(key)
        if transform is None:
            transform = OnShellFunction(f, alpha, sign, self.model.spectrum.mass(alpha),
                                        self.settings.method, self.settings.tol,
                                        self.settings.radial_order_max)
            self._transforms[key] = transform
        return transform

    # Zamolodchikov-Faddeev operators

    def zf_create(self, h: Mapping[int, Wavefunction], psi: FockVector,
                  grades: Optional[Iterable[int]] = None) -> FockVector:
        """
        Creation operator z+(h)

        Args:
            h: One-particle data per type
            psi: Vector acted on
            grades: Output grades to keep; others are projected away
                exactly. Without it, components above two particles are
                dropped and flagged.
        """
        keep = None if grades is None else set(grades)
        one: Dict[int, Wavefunction] = {}
        two: Dict[Tuple[int, int], Wavefunction] = {}
        truncated = psi.truncated

        if psi.vacuum != 0 and (keep is None or 1 in keep):
            for alpha, w in h.items():
                one[alpha] = _combine(None, w, psi.vacuum)

        if psi.one and (keep is None or 2 in keep):
            types = set(h) | set(psi.one)
            for a in types:
                for b in types:
                    h_a, k_b = h.get(a), psi.one.get(b)
                    h_b, k_a = h.get(b), psi.one.get(a)
                    if (h_a is None or k_b is None) and (h_b is None or k_a is None):
                        continue
                    two[(a, b)] = SymmetrizedProduct(h_a, k_b, h_b, k_a, self.model.component(b, a))

        if psi.two and h and (keep is None or 3 in keep):
            logger.warning("creation on a two-particle vector exceeds the truncation; component dropped")
            truncated = True

        return FockVector(self.N, 0j, one, two, truncated)

    def contract(self, kernel: Mapping[int, Wavefunction], psi: FockVector,
                 grades: Optional[Iterable[int]] = None) -> FockVector:
        """Lower the particle number by one, contracting the first variable with `kernel`"""
        keep = None if grades is None else set(grades)
        vacuum = 0j
        one: Dict[int, Wavefunction] = {}

        if psi.one and (keep is None or 0 in keep):
            for alpha, k in kernel.items():
                w = psi.one.get(alpha)
                if w is not None:
                    vacuum += self._line_integral(k, w)

        if psi.two and (keep is None or 1 in keep):
            betas = {b for (_, b) in psi.two}
            for beta in sorted(betas):
                terms = [(kernel[a], psi.two[(a, b)]) for (a, b) in sorted(psi.two)
                         if b == beta and a in kernel]
                if terms:
                    one[beta] = Contracted(terms, self.settings.level)

        return FockVector(self.N, vacuum, one, {}, psi.truncated)

    def zf_annihilate(self, h: Mapping[int, Wavefunction], psi: FockVector,
                      grades: Optional[Iterable[int]] = None) -> FockVector:
        """Adjoint of zf_create: contraction with the kernel conj(h)"""
        return self.contract({alpha: Reflected(w) for alpha, w in h.items()}, psi, grades)

    # fields

    def phi_data(self, f: TestFunction) -> Tuple[Dict[int, Wavefunction], Dict[int, Wavefunction]]:
        """Creation data f^+ and contraction kernel K_a = f^-_{bar a}"""
        create = {alpha: OnShellWavefunction(self.onshell(f, alpha, 1)) for alpha in f.types}
        kernel = {self.antiparticle(alpha): OnShellWavefunction(self.onshell(f, alpha, -1)) for alpha in f.types}
        return create, kernel

    def apply_phi(self, f: TestFunction, psi: FockVector,
                  grades: Optional[Iterable[int]] = None) -> FockVector:
        """phi(f) psi = z+(f^+) psi + z(K) psi"""
        create, kernel = self.phi_data(f)
        return self.zf_create(create, psi, grades) + self.contract(kernel, psi, grades)

    def J(self, psi: FockVector) -> FockVector:
        """Antiunitary CPT operator"""
        bar = self.antiparticle
        return FockVector(
            self.N,
            complex(psi.vacuum).conjugate(),
            {bar(a): Reflected(w) for a, w in psi.one.items()},
            {(bar(b), bar(a)): Reflected(w) for (a, b), w in psi.two.items()},
            psi.truncated,
        )

    def apply_phi_reflected(self, g: TestFunction, psi: FockVector,
                            grades: Optional[Iterable[int]] = None) -> FockVector:
        """phi'(g) = J phi(cpt_partner(g)) J"""
        return self.J(self.apply_phi(cpt_partner(g), self.J(psi), grades))

    def apply_chi(self, f: TestFunction, psi: FockVector) -> FockVector:
        """
        Bound-state operator on one-particle vectors

        (chi(f) psi)^c(t) = sum over (a, b) -> c of
            -i eta^c_{ab} f^+_a(t + i theta_(ab)) psi_b(t - i theta_(ba))

        Raises:
            DomainError: a pole of psi_b lies within the shifted strip
            RequestError: psi has a two-particle component
        """
        if self.table is None:
            raise DependencyMissing("chi needs a fusion table with eta coefficients")
        if psi.two:
            raise RequestError("chi acts on vectors with at most one particle")
        f_types = set(f.types)
        out: Dict[int, Wavefunction] = {}
        for process in self.table:
            if process.eta == 0 or process.alpha not in f_types:
                continue
            w = psi.one.get(process.beta)
            if w is None:
                continue
            shift = process.angles.theta_ba
            for q in w.poles():
                if abs(q) <= shift + MARGIN_TOL:
                    raise DomainError(complex(0.0, q),
                                      f"pole at offset {q:.6g}i within the shift {shift:.6g} "
                                      f"of process ({process.alpha},{process.beta})")
            term = ShiftedProduct(
                [(OnShellWavefunction(self.onshell(f, process.alpha, 1)), process.angles.theta_ab),
                 (w, -shift)],
                -1j * process.eta,
            )
            out[process.gamma] = _combine(out.get(process.gamma), term)
        return FockVector(self.N, 0j, out, {}, psi.truncated)

    def apply_chi_reflected(self, g: TestFunction, psi: FockVector) -> FockVector:
        """chi'(g) = J chi(cpt_partner(g)) J on one-particle vectors"""
        return self.J(self.apply_chi(cpt_partner(g), self.J(psi)))

    # inner products

    def _line_integral(self, left: Wavefunction, right: Wavefunction, conjugate_left: bool = False) -> complex:
        """int left(t) right(t) dt, with conj(left) if requested"""
        def integrand(t):
            lv = left(t)
            return (np.conj(lv) if conjugate_left else lv) * right(t)

        envelope = left.envelope() or right.envelope()
        if envelope is None:
            nodes, weights = sinh_rule(self.settings.level)
            return complex(np.sum(weights * integrand(nodes)))

        center, a = envelope
        # nodes where the envelope exp(-a (t - center)^2) drops below tol * 1e-3 are skipped
        window = (math.log(1e3 / self.settings.tol) / a) ** 0.5

        def evaluate(order):
            nodes, weights = hermite_rule(center, a, order)
            inside = np.abs(nodes - center) <= window
            terms = weights[inside] * integrand(nodes[inside])
            return complex(np.sum(terms)), float(np.sum(np.abs(terms)))

        orders = doubling_orders(32, self.settings.hermite_order_max)
        result = adaptive_sum(evaluate, orders, self.settings.tol)
        if not result.converged:
            raise QuadratureError("Hermite inner product did not converge", result.error)
        return result.value

    def _plane_integral(self, left: Wavefunction, right: Wavefunction) -> complex:
        nodes, weights = sinh_rule(self.settings.level)
        t1, t2 = nodes[:, None], nodes[None, :]
        values = np.conj(left(t1, t2)) * right(t1, t2)
        return complex(weights @ values @ weights)

    def inner(self, bra: FockVector, ket: FockVector) -> complex:
        """Fock inner product, antilinear in the bra"""
        total = complex(bra.vacuum).conjugate() * ket.vacuum
        for alpha, w in bra.one.items():
            k = ket.one.get(alpha)
            if k is not None:
                total += self._line_integral(w, k, conjugate_left=True)
        for key, w in bra.two.items():
            k = ket.two.get(key)
            if k is not None:
                total += self._plane_integral(w, k)
        return total

    # serialization

    def vector_from_dict(self, data: dict) -> FockVector:
        return FockVector(
            int(data['N']),
            complex(*data['vacuum']),
            {int(a): self.wavefunction_from_dict(w) for a, w in data['one'].items()},
            {tuple(int(x) for x in key.split(',')): self.wavefunction_from_dict(w)
             for key, w in data['two'].items()},
            bool(data.get('truncated', False)),
        )

    def wavefunction_from_dict(self, data: Optional[dict]) -> Optional[Wavefunction]:
        if data is None:
            return None
        kind = data['kind']
        if kind == 'gaussian':
            return GaussianWavefunction([
                GaussianTerm(complex(*t['c']), t['a'], t['theta0'], t['k']) for t in data['terms']
            ])
        if kind == 'onshell':
            f = TestFunction.from_dict(data['test_function'])
            transform = OnShellFunction(f, data['alpha'], data['sign'], data['mass'], data['method'],
                                        self.settings.tol, self.settings.radial_order_max)
            return OnShellWavefunction(transform, complex(*data['coefficient']))
        if kind == 'sum':
            return SumWavefunction([self.wavefunction_from_dict(p) for p in data['parts']],
                                   [complex(*c) for c in data['coefficients']])
        if kind == 'shifted_product':
            return ShiftedProduct([(self.wavefunction_from_dict(f['wavefunction']), f['shift'])
                                   for f in data['factors']], complex(*data['coefficient']))
        if kind == 'reflected':
            return Reflected(self.wavefunction_from_dict(data['inner']))
        if kind == 'symmetrized':
            alpha, beta = data['s']
            return SymmetrizedProduct(
                self.wavefunction_from_dict(data['h_a']), self.wavefunction_from_dict(data['k_b']),
                self.wavefunction_from_dict(data['h_b']), self.wavefunction_from_dict(data['k_a']),
                self.model.component(alpha, beta),
            )
        if kind == 'contracted':
            return Contracted([(self.wavefunction_from_dict(t['kernel']), self.wavefunction_from_dict(t['two']))
                               for t in data['terms']], data['level'])
        raise RequestError(f"unknown wavefunction kind {kind!r}")
