"""Report files for verification runs"""
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from ..core.config import Config

logger = logging.getLogger(__name__)

FUSION_COLUMNS = ['N', 'alpha', 'beta', 'gamma', 'theta_ab', 'theta_ba', 'pole_im', 'residue', 'eta_re', 'eta_im']
POLE_COLUMNS = ['N', 'alpha', 'beta', 'pole_re', 'pole_im', 'channel', 'residue_re', 'residue_im']
AXIOM_COLUMNS = ['check', 'target', 'max_error', 'tolerance', 'passed', 'points']
DEFECT_COLUMNS = ['kind', 'label', 'phi_re', 'phi_im', 'chi_re', 'chi_im', 'residue_re', 'residue_im',
                  'total_re', 'total_im', 'scale', 'complete', 'passed']
PLOT_COLUMNS = ['label', 'level', 'abs_total', 'agreement_gap', 'scale', 'abs_phi']


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    return str(value)


class ReportGenerator:
    """Write JSON, CSV and text summaries into one output directory"""

    def __init__(self, output_dir: Optional[Path] = None, config: Optional[Config] = None):
        """
        Args:
            output_dir: Target directory (Config.OUTPUT_DIR if not given)
            config: Configuration object (uses default if not provided)
        """
        self.config = config or Config()
        self.output_dir = self.config.ensure_directories(output_dir)
        self.jinja_env = Environment(
            loader=FileSystemLoader(str(self.config.TEMPLATE_DIR)),
            undefined=StrictUndefined,
            keep_trailing_newline=True,
        )

    def write_json(self, name: str, data: Any) -> Path:
        path = self.output_dir / f"{name}.json"
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, sort_keys=True, default=_json_default)
        logger.debug(f"wrote {path}")
        return path

    def write_csv(self, name: str, rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> Path:
        """
        Rows as CSV with round-trip float formatting

        Floats are written with repr so the files can be compared byte for
        byte between runs.
        """
        path = self.output_dir / f"{name}.csv"
        frame = pd.DataFrame(list(rows), columns=list(columns))
        frame.to_csv(path, index=False, lineterminator='\n')
        logger.debug(f"wrote {path} ({len(frame)} rows)")
        return path

    def render_summary(self, command: str, context: Dict[str, Any]) -> str:
        template = self.jinja_env.get_template('summary.txt.j2')
        return template.render(
            command=command,
            generated=datetime.now().strftime('%Y-%m-%d %H:%M:%S'),
            **context,
        )

    def write_summary(self, command: str, context: Dict[str, Any]) -> Path:
        path = self.output_dir / f"summary_{command}.txt"
        path.write_text(self.render_summary(command, context), encoding='utf-8')
        return path

    def axioms_report(self, suite, settings: Dict[str, str]) -> List[Path]:
        """axioms.json, axioms.csv and poles.csv for an AxiomSuite"""
        rows = [r.to_dict() for r in suite.reports]
        paths = [
            self.write_json('axioms', {'settings': settings, 'summary': suite.summary(), 'checks': rows}),
            self.write_csv('axioms', rows, AXIOM_COLUMNS),
            self.write_csv('poles', suite.pole_rows, POLE_COLUMNS),
        ]
        failed = [r for r in rows if not r['passed']]
        paths.append(self.write_summary('axioms', {
            'settings': settings,
            'passed': suite.passed,
            'lines': [f"{r['check']:<20} {r['target']:<36} {r['max_error']:.3e}" for r in failed],
            'headline': f"{len(rows) - len(failed)}/{len(rows)} checks passed",
        }))
        return paths

    def fusion_report(self, suite, settings: Dict[str, str]) -> List[Path]:
        """fusion.csv and fusion.json for a FusionSuite"""
        calibration = suite.table.calibration.to_dict() if suite.table.calibration else None
        paths = [
            self.write_csv('fusion', suite.rows(), FUSION_COLUMNS),
            self.write_json('fusion', {
                'settings': settings,
                'processes': suite.rows(),
                'eta': suite.eta_summary(),
                'calibration': calibration,
                'pole_checks': [r.to_dict() for r in suite.pole_checks],
                'error': suite.error,
            }),
        ]
        paths.append(self.write_summary('fusion', {
            'settings': settings,
            'passed': suite.passed,
            'lines': [f"{e['process']:<14} |eta|^2 {e['eta_abs_squared']:.10g}  ratio {e['ratio']:.6f}"
                      for e in suite.eta_summary()] + ([suite.error] if suite.error else []),
            'headline': f"{len(suite.table)} processes",
        }))
        return paths

    def weak_commutator_report(self, suite, settings: Dict[str, str]) -> List[Path]:
        """Per-request JSON, CSV summary and convergence plot data for a WeakCommutatorSuite"""
        paths = [
            self.write_json('weak_commutator', {
                'settings': settings,
                'requests': [r.to_dict() for r in suite.reports],
                'controls': [dict(r.to_dict(), exceeds=r.exceeds()) for r in suite.controls],
                'vacuum': suite.vacuum,
                'cross_terms_vanish': suite.cross_terms,
                'convergence': [
                    {'label': s.label, 'levels': list(s.levels), 'gaps': s.gaps, 'monotone': s.monotone}
                    for s in suite.studies
                ],
                'calibration': suite.calibration,
                'complete': suite.complete,
                'passed': suite.passed,
                'error': suite.error,
            }),
            self.write_csv('weak_commutator', suite.summary_rows(), DEFECT_COLUMNS),
            self.write_csv('convergence', suite.plot_rows(), PLOT_COLUMNS),
        ]
        lines = [
            f"{row['kind']:<8} {row['label']:<24} |total| {abs(complex(row['total_re'], row['total_im'])):.3e}"
            f"  scale {row['scale']:.3e}  {'ok' if row['passed'] else 'FAIL'}"
            for row in suite.summary_rows()
        ]
        if suite.error:
            lines.append(suite.error)
        paths.append(self.write_summary('weak_commutator', {
            'settings': settings,
            'passed': suite.passed,
            'lines': lines,
            'headline': f"{len(suite.reports)} requests, {len(suite.controls)} negative controls",
        }))
        return paths
