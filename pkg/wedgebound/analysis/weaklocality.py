"""
Weak wedge-locality of phi + chi at the one-particle level

For one-particle (or vacuum) bra and ket, f in the left wedge and g in the
right wedge, the matrix element of [phi(f), phi'(g)] is a residue defect
coming from the poles of S in the physical strip. The bound-state commutator
[chi(f), chi'(g)] should cancel it. The defect is computed three ways:
directly through the Fock space operators, as the residue sum obtained by
shifting the contour, and as minus the chi commutator.
"""
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.config import RunConfig
from ..core.errors import ContourConflict, RequestError, WedgeboundError
from ..core.smatrix import PI, residue_at
from ..fields.fock import FockSpace, FockVector, OnShellWavefunction, ShiftedProduct, SumWavefunction
from ..fields.testfn import Bump, TestFunction, Wedge, wedge_support_check

logger = logging.getLogger(__name__)

CANCELLATION_TOL = 1e-3
AGREEMENT_TOL = 2e-2
VACUUM_TOL = 1e-6
CONTROL_FACTOR = 10.0
MONOTONE_FLOOR = 1e-9
MARGIN = 0.1
BUMP_RADIUS = 1.2


@dataclass(frozen=True)
class MatrixElementRequest:
    """
    <bra, [A(f), A'(g)] ket> with f localized in left_wedge and g in right_wedge

    validate=False skips the support checks (negative controls only).
    """
    bra: FockVector
    ket: FockVector
    f: TestFunction
    g: TestFunction
    left_wedge: Wedge = Wedge('left')
    right_wedge: Wedge = Wedge('right')
    label: str = ''
    validate: bool = True

    def translated(self, shift: Tuple[float, float], label: Optional[str] = None) -> 'MatrixElementRequest':
        return replace(
            self,
            f=self.f.translated(shift),
            g=self.g.translated(shift),
            left_wedge=self.left_wedge.translated(shift),
            right_wedge=self.right_wedge.translated(shift),
            label=self.label if label is None else label,
        )


def validate_request(req: MatrixElementRequest, space: FockSpace):
    """
    Raise RequestError unless the request is computable at the one-particle level

    Checks grades, particle types {1, N-1}, wedge sides and separation, and
    (when req.validate) that the supports keep 0.1/m from the wedge boundaries.
    """
    N = space.N
    allowed = {1, N - 1}
    for name, vector in (('bra', req.bra), ('ket', req.ket)):
        if vector.N != N:
            raise RequestError(f"{name} belongs to N={vector.N}, model has N={N}")
        if vector.two or vector.truncated:
            raise RequestError(f"{name} has a two-particle component; only n <= 1 is supported")
        if not vector.types() <= allowed:
            raise RequestError(f"{name} carries types {sorted(vector.types())}, allowed {sorted(allowed)}")
    for name, f in (('f', req.f), ('g', req.g)):
        if f.N != N:
            raise RequestError(f"{name} belongs to N={f.N}, model has N={N}")
        if not set(f.types) <= allowed:
            raise RequestError(f"{name} carries types {f.types}, allowed {sorted(allowed)}")
    if not req.validate:
        return
    if req.left_wedge.side != 'left' or req.right_wedge.side != 'right':
        raise RequestError("f needs a left wedge and g a right wedge")
    if not req.left_wedge.spacelike_to(req.right_wedge):
        raise RequestError("the wedges of f and g are not spacelike separated")
    margin = MARGIN / space.model.spectrum.m1
    if not wedge_support_check(req.f, req.left_wedge, margin):
        raise RequestError(f"support of f leaves the left wedge (margin {margin:g})")
    if not wedge_support_check(req.g, req.right_wedge, margin):
        raise RequestError(f"support of g leaves the right wedge (margin {margin:g})")


@dataclass(frozen=True)
class CommutatorElement:
    """Forward and backward products of a commutator matrix element"""
    forward: complex
    backward: complex
    truncated: bool = False

    @property
    def value(self) -> complex:
        return self.forward - self.backward


def _intermediate_grades(bra: FockVector) -> List[int]:
    return sorted({n + d for n in bra.grades() for d in (-1, 1)} & {0, 1, 2})


def phi_commutator_element(req: MatrixElementRequest, space: FockSpace) -> CommutatorElement:
    """
    <bra, [phi(f), phi'(g)] ket> by composing the field operators

    Intermediate vectors are projected on the grades that can reach the bra,
    so for n <= 1 nothing is lost at two particles.
    """
    if req.validate:
        validate_request(req, space)
    middle = _intermediate_grades(req.bra)
    outer = sorted(req.bra.grades())

    right = space.apply_phi_reflected(req.g, req.ket, middle)
    forward_vector = space.apply_phi(req.f, right, outer)
    left = space.apply_phi(req.f, req.ket, middle)
    backward_vector = space.apply_phi_reflected(req.g, left, outer)

    truncated = any(v.truncated for v in (right, forward_vector, left, backward_vector))
    if truncated:
        logger.warning(f"{req.label or 'request'}: a component above two particles was dropped")
    return CommutatorElement(
        space.inner(req.bra, forward_vector),
        space.inner(req.bra, backward_vector),
        truncated,
    )


def chi_commutator_element(req: MatrixElementRequest, space: FockSpace) -> CommutatorElement:
    """<bra, [chi(f), chi'(g)] ket>; chi preserves the particle number"""
    if req.validate:
        validate_request(req, space)
    ket = FockVector(space.N, 0j, req.ket.one)
    forward = space.apply_chi(req.f, space.apply_chi_reflected(req.g, ket))
    backward = space.apply_chi_reflected(req.g, space.apply_chi(req.f, ket))
    return CommutatorElement(space.inner(req.bra, forward), space.inner(req.bra, backward))


def defect_kernel(req: MatrixElementRequest, space: FockSpace, beta: int) -> Optional[SumWavefunction]:
    """
    D_beta(t) = -2 pi i sum_alpha sum_p Res_p S^{alpha beta} g^-_{bar alpha}(t + p) f^+_alpha(t + p)

    p runs over the poles of S^{alpha beta} in the open physical strip.

    Raises:
        ContourConflict: a pole of order above one lies in the strip
    """
    g_types = set(req.g.types)
    parts, coefficients = [], []
    for alpha in req.f.types:
        bar = space.antiparticle(alpha)
        if bar not in g_types:
            continue
        component = space.model.component(alpha, beta)
        for pole in component.poles:
            if not 0.0 < pole.location.imag < PI:
                continue
            if pole.order > 1:
                raise ContourConflict(f"pole of order {pole.order} at {pole.location} in S^{{{alpha}{beta}}}")
            residue = residue_at(component, pole.location)
            shift = pole.location.imag
            parts.append(ShiftedProduct([
                (OnShellWavefunction(space.onshell(req.g, bar, -1)), shift),
                (OnShellWavefunction(space.onshell(req.f, alpha, 1)), shift),
            ]))
            coefficients.append(-2j * PI * residue)
    if not parts:
        return None
    return SumWavefunction(parts, coefficients)


def residue_formula_element(req: MatrixElementRequest, space: FockSpace) -> complex:
    """
    Residue-sum form of <bra, [phi(f), phi'(g)] ket>

    Only the one-particle diagonal survives: sum over beta of
    int conj(bra_beta) ket_beta D_beta.
    """
    if req.validate:
        validate_request(req, space)
    total = 0j
    for beta, xi in sorted(req.bra.one.items()):
        psi = req.ket.one.get(beta)
        if psi is None:
            continue
        kernel = defect_kernel(req, space, beta)
        if kernel is None:
            continue
        total += space.inner(space.one_particle({beta: xi}),
                             space.one_particle({beta: ShiftedProduct([(psi, 0.0), (kernel, 0.0)])}))
    return total


def cross_terms_vanish(req: MatrixElementRequest, space: FockSpace) -> bool:
    """
    True if the one-particle part of [phi(f), chi'(g)] ket has no one-particle image

    chi keeps the particle number and phi shifts it by one, so between
    one-particle bra and ket the cross commutator vanishes identically.
    """
    ket = FockVector(space.N, 0j, req.ket.one)
    phi_after_chi = space.apply_phi(req.f, space.apply_chi_reflected(req.g, ket))
    phi_image = space.apply_phi(req.f, ket)
    return 1 not in phi_after_chi.grades() and 1 not in phi_image.grades()


@dataclass(frozen=True)
class DefectReport:
    """Outcome of one weak-locality matrix element"""
    label: str
    phi_commutator: complex = 0j
    chi_commutator: complex = 0j
    residue_formula: complex = 0j
    phi_forward: complex = 0j
    phi_backward: complex = 0j
    chi_forward: complex = 0j
    chi_backward: complex = 0j
    level: int = 1
    complete: bool = True
    truncated: bool = False
    error: str = ''
    cancellation_tol: float = CANCELLATION_TOL
    agreement_tol: float = AGREEMENT_TOL

    @property
    def total(self) -> complex:
        return self.phi_commutator + self.chi_commutator

    @property
    def scale(self) -> float:
        return max(abs(self.phi_forward), abs(self.phi_backward), abs(self.chi_forward), abs(self.chi_backward))

    @property
    def agreement_gap(self) -> float:
        return abs(self.phi_commutator - self.residue_formula)

    @property
    def cancelled(self) -> bool:
        return abs(self.total) <= self.cancellation_tol * self.scale

    @property
    def agrees(self) -> bool:
        return self.agreement_gap <= self.agreement_tol * self.scale

    @property
    def passed(self) -> bool:
        return self.complete and not self.truncated and self.cancelled and self.agrees

    def exceeds(self, factor: float = CONTROL_FACTOR) -> bool:
        """Negative-control criterion |total| > factor * tolerance * scale"""
        return self.complete and abs(self.total) > factor * self.cancellation_tol * self.scale

    def to_dict(self) -> dict:
        def pair(z):
            z = complex(z)
            return [z.real, z.imag]

        return {
            'label': self.label,
            'phi_commutator': pair(self.phi_commutator),
            'chi_commutator': pair(self.chi_commutator),
            'residue_formula': pair(self.residue_formula),
            'total': pair(self.total),
            'phi_forward': pair(self.phi_forward),
            'phi_backward': pair(self.phi_backward),
            'chi_forward': pair(self.chi_forward),
            'chi_backward': pair(self.chi_backward),
            'scale': self.scale,
            'agreement_gap': self.agreement_gap,
            'cancellation_tol': self.cancellation_tol,
            'agreement_tol': self.agreement_tol,
            'level': self.level,
            'cancelled': self.cancelled,
            'agrees': self.agrees,
            'passed': self.passed,
            'complete': self.complete,
            'truncated': self.truncated,
            'error': self.error,
        }


def weak_locality_report(req: MatrixElementRequest, space: FockSpace) -> DefectReport:
    """
    All three defect evaluations for one request

    Never raises on numerical failure: the report comes back incomplete
    and therefore not passed.
    """
    label = req.label or 'request'
    try:
        phi = phi_commutator_element(req, space)
        chi = chi_commutator_element(req, space)
        residue = residue_formula_element(req, space)
    except WedgeboundError as e:
        logger.warning(f"{label}: incomplete ({type(e).__name__}: {e})")
        return DefectReport(label, level=space.settings.level, complete=False,
                            error=f"{type(e).__name__}: {e}")
    report = DefectReport(
        label,
        phi_commutator=phi.value,
        chi_commutator=chi.value,
        residue_formula=residue,
        phi_forward=phi.forward,
        phi_backward=phi.backward,
        chi_forward=chi.forward,
        chi_backward=chi.backward,
        level=space.settings.level,
        truncated=phi.truncated or chi.truncated,
    )
    logger.debug(f"{label}: |total| = {abs(report.total):.3e}, scale = {report.scale:.3e}, "
                 f"gap = {report.agreement_gap:.3e}")
    return report


def vacuum_element(req: MatrixElementRequest, space: FockSpace) -> Tuple[complex, float]:
    """<Omega, [phi(f), phi'(g)] Omega> and its scale"""
    vacuum = space.vacuum()
    element = phi_commutator_element(replace(req, bra=vacuum, ket=vacuum), space)
    return element.value, max(abs(element.forward), abs(element.backward))


@dataclass(frozen=True)
class ConvergenceStudy:
    """Defect values of one request across quadrature refinement levels"""
    label: str
    levels: Tuple[int, ...]
    reports: Tuple[DefectReport, ...]

    @property
    def gaps(self) -> List[float]:
        return [r.agreement_gap for r in self.reports]

    @property
    def monotone(self) -> bool:
        """Agreement gap never grows between levels once above the noise floor"""
        if not self.reports:
            return True
        floor = MONOTONE_FLOOR * max(r.scale for r in self.reports)
        gaps = self.gaps
        return all(later <= max(earlier, floor) for earlier, later in zip(gaps, gaps[1:]))

    def rows(self) -> List[dict]:
        return [
            {
                'label': self.label,
                'level': level,
                'abs_total': abs(r.total),
                'agreement_gap': r.agreement_gap,
                'scale': r.scale,
                'abs_phi': abs(r.phi_commutator),
            }
            for level, r in zip(self.levels, self.reports)
        ]


def convergence_study(req: MatrixElementRequest, space: FockSpace,
                      levels: Sequence[int] = (0, 1, 2)) -> ConvergenceStudy:
    """weak_locality_report at each quadrature refinement level"""
    reports = []
    for level in levels:
        refined = space.with_settings(replace(space.settings, level=level))
        reports.append(weak_locality_report(req, refined))
    return ConvergenceStudy(req.label, tuple(levels), tuple(reports))


# scenarios

def _testfn(N: int, entries: Sequence[Tuple[int, Tuple[float, float], complex]], name: str) -> TestFunction:
    components: Dict[int, List[Bump]] = {}
    for alpha, center, amplitude in entries:
        components.setdefault(alpha, []).append(Bump(center, BUMP_RADIUS, complex(amplitude)))
    return TestFunction.from_mapping(N, components, name)


def default_vectors(space: FockSpace) -> Tuple[FockVector, FockVector]:
    """Gaussian bra and ket over types 1 and N-1"""
    top = space.N - 1
    bra = {1: (1.0, 0.3, 1.0)}
    ket = {1: (0.8, -0.1, 1.0)}
    if top != 1:
        bra[top] = (1.2, -0.2, 0.5 + 0.3j)
        ket[top] = (1.0, 0.4, 1.0)
    return space.gaussian_vector(bra), space.gaussian_vector(ket)


def default_scenario(space: FockSpace) -> List[MatrixElementRequest]:
    """
    Five wedge-separated pairs over types 1 and N-1

    The fifth pair is the first one translated by (0.5, 0.3) together with
    both wedges.
    """
    N = space.N
    top = N - 1
    bra, ket = default_vectors(space)
    pairs = [
        ('P1',
         [(1, (0.0, -2.0), 1.0), (top, (0.2, -2.4), 0.7)],
         [(1, (0.1, 2.2), 0.8), (top, (-0.2, 2.1), 1.1)]),
        ('P2',
         [(1, (-0.3, -2.3), 1.0)],
         [(1, (0.3, 2.3), 1.0)]),
        ('P3',
         [(top, (0.0, -2.1), 0.9)],
         [(top, (0.25, 2.3), 0.6 + 0.2j)]),
        ('P4',
         [(1, (0.4, -2.5), 0.5 - 0.5j), (top, (-0.1, -2.0), 1.0)],
         [(1, (0.0, 2.0), 1.0), (top, (0.3, 2.4), 0.7)]),
    ]
    requests = [
        MatrixElementRequest(bra, ket, _testfn(N, f, f'{label}.f'), _testfn(N, g, f'{label}.g'), label=label)
        for label, f, g in pairs
    ]
    requests.append(requests[0].translated((0.5, 0.3), label='P5'))
    return requests


def negative_controls(space: FockSpace) -> List[Tuple[MatrixElementRequest, FockSpace]]:
    """
    Requests that must fail: overlapping supports, and eta switched off
    """
    N = space.N
    bra, ket = default_vectors(space)
    overlap = MatrixElementRequest(
        bra, ket,
        _testfn(N, [(1, (0.0, -0.3), 1.0)], 'overlap.f'),
        _testfn(N, [(1, (0.0, 0.3), 1.0)], 'overlap.g'),
        label='overlapping-supports',
        validate=False,
    )
    controls = [(overlap, space)]
    if space.table is not None and len(space.table):
        reference = default_scenario(space)[0]
        controls.append((replace(reference, label='eta-zero'), space.with_table(space.table.zeroed())))
    return controls


def requests_from_config(config: RunConfig, space: FockSpace) -> List[MatrixElementRequest]:
    """
    Requests named in a run file

    A test function's shift translates both its bumps and its wedge.
    """
    testfns: Dict[str, Tuple[TestFunction, Wedge]] = {}
    for name, spec in config.testfns.items():
        f = TestFunction.from_mapping(space.N, {
            alpha: [Bump((b.x0, b.x1), b.radius, complex(b.amplitude))] for alpha, b in spec.components.items()
        }, name).translated(spec.shift)
        testfns[name] = (f, Wedge(spec.wedge).translated(spec.shift))

    def vector(name: str) -> FockVector:
        if name == 'vacuum':
            return space.vacuum()
        spec = config.vectors[name]
        return space.gaussian_vector({
            alpha: (g.a, g.theta0, complex(g.coefficient)) for alpha, g in spec.components.items()
        })

    requests = []
    for index, spec in enumerate(config.requests):
        f, left = testfns[spec.f]
        g, right = testfns[spec.g]
        requests.append(MatrixElementRequest(
            vector(spec.bra), vector(spec.ket), f, g, left, right,
            label=f"request.{index}:{spec.f}|{spec.g}",
        ))
    return requests
