"""Verification suites run by the command-line front end"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..core.config import RunConfig
from ..core.errors import CalibrationFailure, WedgeboundError
from ..core.fusion import (
    FusionTable, attach_residues, build_fusion_table, calibrate_eta, check_pole_consistency,
    eta_ratio, expected_eta_squared, export_rows,
)
from ..core.smatrix import (
    AxiomReport, SMatrixModel, check_crossing, check_path_independence, check_symmetries,
    check_unitarity, export_pole_rows, real_grid,
)
from ..fields.fock import FockSpace, QuadratureSettings
from . import weaklocality
from .weaklocality import ConvergenceStudy, DefectReport

logger = logging.getLogger(__name__)


@dataclass
class AxiomSuite:
    """Unitarity, crossing, bootstrap and symmetry checks of one model"""
    N: int
    reports: List[AxiomReport] = field(default_factory=list)
    pole_rows: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def summary(self) -> Dict[str, Any]:
        failed = [r for r in self.reports if not r.passed]
        return {
            'N': self.N,
            'checks': len(self.reports),
            'failed': len(failed),
            'worst': max((r.max_error for r in self.reports), default=0.0),
            'passed': self.passed,
        }


@dataclass
class FusionSuite:
    """Fusion table with residues, calibrated eta and pole consistency checks"""
    N: int
    table: FusionTable
    pole_checks: List[AxiomReport] = field(default_factory=list)
    error: str = ''

    @property
    def passed(self) -> bool:
        return not self.error and all(r.passed for r in self.pole_checks)

    def rows(self) -> List[dict]:
        return export_rows(self.table)

    def eta_summary(self) -> List[dict]:
        return [
            {
                'process': f"({p.alpha},{p.beta})->{p.gamma}",
                'eta_abs_squared': abs(p.eta) ** 2,
                'expected': expected_eta_squared(p),
                'ratio': eta_ratio(p),
                'source': p.eta_source,
            }
            for p in self.table
        ]


@dataclass
class WeakCommutatorSuite:
    """Positive requests, negative controls and the checks around them"""
    N: int
    reports: List[DefectReport] = field(default_factory=list)
    controls: List[DefectReport] = field(default_factory=list)
    studies: List[ConvergenceStudy] = field(default_factory=list)
    vacuum: List[Dict[str, Any]] = field(default_factory=list)
    cross_terms: Dict[str, bool] = field(default_factory=dict)
    calibration: Optional[Dict[str, Any]] = None
    error: str = ''

    @property
    def complete(self) -> bool:
        return not self.error and all(r.complete for r in self.reports + self.controls)

    @property
    def passed(self) -> bool:
        return (
            self.complete
            and all(r.passed for r in self.reports)
            and all(r.exceeds() for r in self.controls)
            and all(v['passed'] for v in self.vacuum)
            and all(s.monotone for s in self.studies)
            and all(self.cross_terms.values())
        )

    def summary_rows(self) -> List[dict]:
        rows = []
        for kind, reports in (('request', self.reports), ('control', self.controls)):
            for r in reports:
                total = complex(r.total)
                rows.append({
                    'kind': kind,
                    'label': r.label,
                    'phi_re': complex(r.phi_commutator).real,
                    'phi_im': complex(r.phi_commutator).imag,
                    'chi_re': complex(r.chi_commutator).real,
                    'chi_im': complex(r.chi_commutator).imag,
                    'residue_re': complex(r.residue_formula).real,
                    'residue_im': complex(r.residue_formula).imag,
                    'total_re': total.real,
                    'total_im': total.imag,
                    'scale': r.scale,
                    'complete': r.complete,
                    'passed': r.passed if kind == 'request' else r.exceeds(),
                })
        return rows

    def plot_rows(self) -> List[dict]:
        return [row for study in self.studies for row in study.rows()]


class VerificationRunner:
    """Build models from a RunConfig and run the verification suites"""

    def __init__(self, config: RunConfig, workers: int = 1):
        """
        Args:
            config: Validated run configuration
            workers: Threads used for independent matrix-element requests
        """
        self.config = config
        self.workers = max(1, workers)

    def settings(self, level: Optional[int] = None) -> QuadratureSettings:
        return QuadratureSettings(
            level=self.config.quad_level if level is None else level,
            tol=self.config.quad_tol,
            radial_order_max=self.config.radial_order_max,
            hermite_order_max=self.config.hermite_order_max,
        )

    def model(self) -> SMatrixModel:
        return SMatrixModel(self.config.n, self.config.mass, perturb=self.config.perturb_s)

    def run_axioms(self) -> AxiomSuite:
        """Checks on every component with indices in {1, N-1}"""
        model = self.model()
        N = model.N
        grid = real_grid(self.config.grid_points, self.config.grid_extent)
        indices = sorted({1, N - 1})
        suite = AxiomSuite(N)
        for alpha in indices:
            for beta in indices:
                suite.reports.append(check_unitarity(model.component(alpha, beta), grid))
                suite.reports.append(check_crossing(model, alpha, beta))
        suite.reports.extend(check_path_independence(model))
        suite.reports.extend(check_symmetries(model, grid))
        try:
            suite.pole_rows = export_pole_rows(model, [(a, b) for a in indices for b in indices])
        except WedgeboundError as e:
            logger.warning(f"pole rows unavailable: {e}")
        logger.debug(f"axiom suite N={N}: {suite.summary()}")
        return suite

    def run_fusion(self, model: Optional[SMatrixModel] = None) -> FusionSuite:
        """
        Fusion table with residues, pole checks and calibrated eta

        A failure anywhere after the table is built is recorded in
        `suite.error`; the table then keeps eta = 0.
        """
        model = model or self.model()
        table = attach_residues(build_fusion_table(model.N, model.spectrum), model)
        suite = FusionSuite(model.N, table)
        try:
            suite.pole_checks = check_pole_consistency(table, model)
            suite.table = calibrate_eta(table, model, settings=self.settings(), zero_eta=self.config.zero_eta)
        except CalibrationFailure as e:
            suite.error = f"{type(e).__name__}: {e}"
            logger.warning(f"calibration failed, residuals {e.residuals}")
        except WedgeboundError as e:
            suite.error = f"{type(e).__name__}: {e}"
            logger.warning(f"fusion table unavailable: {suite.error}")
        return suite

    def requests(self, space: FockSpace) -> List[weaklocality.MatrixElementRequest]:
        if self.config.scenario == 'default':
            return weaklocality.default_scenario(space) + weaklocality.requests_from_config(self.config, space)
        return weaklocality.requests_from_config(self.config, space)

    def _map(self, function, items):
        if self.workers == 1 or len(items) < 2:
            return [function(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(function, items))

    def run_weak_commutator(self) -> WeakCommutatorSuite:
        """
        Reports for the configured requests plus the negative controls

        An empty request list gives an empty, passing suite.
        """
        model = self.model()
        suite = WeakCommutatorSuite(model.N)
        base = FockSpace(model, None, self.settings())
        requests = self.requests(base)
        if not requests:
            return suite

        fusion = self.run_fusion(model)
        if fusion.error:
            suite.error = fusion.error
            return suite
        table = fusion.table
        if table.calibration is not None:
            suite.calibration = table.calibration.to_dict()
        space = base.with_table(table)

        suite.reports = self._map(lambda req: weaklocality.weak_locality_report(req, space), requests)
        suite.controls = [
            weaklocality.weak_locality_report(req, control_space)
            for req, control_space in weaklocality.negative_controls(space)
        ]
        suite.studies = self._map(
            lambda req: weaklocality.convergence_study(req, space, self.config.quad_levels), requests)

        for req in requests:
            try:
                value, scale = weaklocality.vacuum_element(req, space)
                suite.vacuum.append({
                    'label': req.label,
                    'value': [value.real, value.imag],
                    'scale': scale,
                    'passed': abs(value) <= weaklocality.VACUUM_TOL * max(scale, 1e-300),
                })
                suite.cross_terms[req.label] = weaklocality.cross_terms_vanish(req, space)
            except WedgeboundError as e:
                suite.error = f"{req.label}: {type(e).__name__}: {e}"
                logger.warning(suite.error)
        return suite
