"""Configuration management for wedgebound"""
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

from .errors import ConfigError

# Load environment variables
load_dotenv()


class Config:
    """Application configuration"""

    # Output settings
    OUTPUT_DIR = Path(os.getenv('OUTPUT_DIR', './reports'))

    # Application settings
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

    # Template directory
    TEMPLATE_DIR = Path(__file__).parent.parent / 'templates'

    @classmethod
    def ensure_directories(cls, output_dir: Optional[Path] = None) -> Path:
        """Ensure the report directory exists and return it"""
        target = Path(output_dir) if output_dir is not None else cls.OUTPUT_DIR
        target.mkdir(parents=True, exist_ok=True)
        return target


@dataclass(frozen=True)
class BumpSpec:
    """One disc bump: center (x0, x1), radius and complex amplitude"""
    x0: float
    x1: float
    radius: float
    amplitude: complex = 1.0


@dataclass(frozen=True)
class TestFunctionSpec:
    """A wedge-localized test function as read from the run file"""
    __test__ = False

    name: str
    wedge: str
    shift: Tuple[float, float] = (0.0, 0.0)
    components: Mapping[int, BumpSpec] = field(default_factory=dict)


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian one-particle wavefunction c * exp(-a (theta - theta0)^2)"""
    a: float
    theta0: float
    coefficient: complex = 1.0


@dataclass(frozen=True)
class VectorSpec:
    """A one-particle vector, one Gaussian per particle type"""
    name: str
    components: Mapping[int, GaussianSpec] = field(default_factory=dict)


@dataclass(frozen=True)
class RequestSpec:
    """Names of bra, ket and the two test functions of a matrix element"""
    bra: str
    ket: str
    f: str
    g: str


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of a verification run.

    Every field has a default; `RunConfig.from_file` reads a flat key-value
    file whose keys carry a section prefix (see README, "Configuration").
    """
    n: int = 3
    mass: float = 1.0
    quad_level: int = 1
    quad_levels: Tuple[int, ...] = (0, 1, 2)
    quad_tol: float = 1e-9
    radial_order_max: int = 2048
    hermite_order_max: int = 256
    grid_points: int = 100
    grid_extent: float = 5.0
    scenario: str = 'default'
    testfns: Mapping[str, TestFunctionSpec] = field(default_factory=dict)
    vectors: Mapping[str, VectorSpec] = field(default_factory=dict)
    requests: Tuple[RequestSpec, ...] = ()
    zero_eta: bool = False
    perturb_s: float = 0.0
    output_dir: Path = field(default_factory=lambda: Config.OUTPUT_DIR)

    SCALAR_KEYS = {
        'model.n': ('n', int),
        'model.mass': ('mass', float),
        'quad.level': ('quad_level', int),
        'quad.levels': ('quad_levels', lambda v: tuple(int(x) for x in _split(v))),
        'quad.tol': ('quad_tol', float),
        'quad.radial_order_max': ('radial_order_max', int),
        'quad.hermite_order_max': ('hermite_order_max', int),
        'grid.points': ('grid_points', int),
        'grid.extent': ('grid_extent', float),
        'scenario': ('scenario', str),
        'debug.zero_eta': ('zero_eta', lambda v: _parse_bool(v)),
        'debug.perturb_s': ('perturb_s', float),
        'output.dir': ('output_dir', Path),
    }

    @classmethod
    def from_file(cls, path: Path) -> 'RunConfig':
        """
        Parse a run file

        Args:
            path: Path to a flat key-value file (dotenv syntax)

        Returns:
            Validated RunConfig
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        return cls.from_mapping(dotenv_values(path))

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]) -> 'RunConfig':
        """Build a RunConfig from already-parsed key-value pairs"""
        kwargs = {}
        testfns: Dict[str, dict] = {}
        vectors: Dict[str, dict] = {}
        requests: Dict[int, RequestSpec] = {}

        for raw_key, raw_value in values.items():
            key = raw_key.strip().lower()
            value = (raw_value or '').strip()
            try:
                if key in cls.SCALAR_KEYS:
                    name, parse = cls.SCALAR_KEYS[key]
                    kwargs[name] = parse(value)
                elif key.startswith('testfn.'):
                    _parse_testfn_key(testfns, key, value)
                elif key.startswith('vector.'):
                    _parse_vector_key(vectors, key, value)
                elif key.startswith('request.'):
                    index = int(key.split('.', 1)[1])
                    parts = _split(value)
                    if len(parts) != 4:
                        raise ValueError("expected bra,ket,f,g")
                    requests[index] = RequestSpec(*parts)
                else:
                    raise ConfigError(f"unknown configuration key: {raw_key}")
            except ConfigError:
                raise
            except (ValueError, IndexError) as e:
                raise ConfigError(f"bad value for {raw_key}: {value!r} ({e})")

        config = cls(
            testfns={name: _finish_testfn(name, data) for name, data in testfns.items()},
            vectors={name: VectorSpec(name, data) for name, data in vectors.items()},
            requests=tuple(requests[k] for k in sorted(requests)),
            **kwargs,
        )
        config.validate()
        return config

    def with_overrides(self, **changes) -> 'RunConfig':
        """Return a copy with CLI overrides applied (None values are ignored)"""
        changes = {k: v for k, v in changes.items() if v is not None}
        updated = replace(self, **changes)
        updated.validate()
        return updated

    def validate(self):
        """Check value ranges and cross references"""
        if self.n < 2:
            raise ConfigError(f"model.n must be >= 2, got {self.n}")
        if self.mass <= 0:
            raise ConfigError(f"model.mass must be positive, got {self.mass}")
        if self.quad_level < 0 or any(level < 0 for level in self.quad_levels):
            raise ConfigError("quadrature levels must be non-negative")
        if self.scenario not in ('default', 'custom'):
            raise ConfigError(f"scenario must be 'default' or 'custom', got {self.scenario!r}")
        for spec in self.testfns.values():
            if spec.wedge not in ('left', 'right'):
                raise ConfigError(f"testfn.{spec.name}.wedge must be left or right")
            for alpha in spec.components:
                if not 1 <= alpha <= self.n - 1:
                    raise ConfigError(f"testfn.{spec.name}: particle type {alpha} out of range")
        for spec in self.vectors.values():
            for alpha in spec.components:
                if not 1 <= alpha <= self.n - 1:
                    raise ConfigError(f"vector.{spec.name}: particle type {alpha} out of range")
        for request in self.requests:
            for name in (request.bra, request.ket):
                if name != 'vacuum' and name not in self.vectors:
                    raise ConfigError(f"request refers to unknown vector {name!r}")
            for name in (request.f, request.g):
                if name not in self.testfns:
                    raise ConfigError(f"request refers to unknown test function {name!r}")

    def as_dict(self) -> Dict[str, str]:
        """Flat summary used by config_check and the report header"""
        return {
            'model.n': str(self.n),
            'model.mass': repr(self.mass),
            'quad.level': str(self.quad_level),
            'quad.levels': ','.join(str(level) for level in self.quad_levels),
            'quad.tol': repr(self.quad_tol),
            'quad.radial_order_max': str(self.radial_order_max),
            'quad.hermite_order_max': str(self.hermite_order_max),
            'grid.points': str(self.grid_points),
            'grid.extent': repr(self.grid_extent),
            'scenario': self.scenario,
            'testfns': str(len(self.testfns)),
            'vectors': str(len(self.vectors)),
            'requests': str(len(self.requests)),
            'debug.zero_eta': str(self.zero_eta),
            'debug.perturb_s': repr(self.perturb_s),
            'output.dir': str(self.output_dir),
        }


def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(',') if part.strip()]


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off', ''):
        return False
    raise ValueError("expected a boolean")


def _parse_type_suffix(part: str) -> int:
    if not part.startswith('type'):
        raise ConfigError(f"expected type<k>, got {part!r}")
    return int(part[len('type'):])


def _parse_testfn_key(store: Dict[str, dict], key: str, value: str):
    _, name, attribute = key.split('.', 2)
    entry = store.setdefault(name, {'wedge': 'left', 'shift': (0.0, 0.0), 'components': {}})
    if attribute == 'wedge':
        entry['wedge'] = value.lower()
    elif attribute == 'shift':
        x0, x1 = (float(v) for v in _split(value))
        entry['shift'] = (x0, x1)
    else:
        alpha = _parse_type_suffix(attribute)
        numbers = [float(v) for v in _split(value)]
        if len(numbers) not in (3, 4, 5):
            raise ValueError("expected x0,x1,radius[,amp_re[,amp_im]]")
        amp_re = numbers[3] if len(numbers) > 3 else 1.0
        amp_im = numbers[4] if len(numbers) > 4 else 0.0
        if numbers[2] <= 0:
            raise ValueError("radius must be positive")
        entry['components'][alpha] = BumpSpec(numbers[0], numbers[1], numbers[2], complex(amp_re, amp_im))


def _finish_testfn(name: str, data: dict) -> TestFunctionSpec:
    return TestFunctionSpec(name=name, wedge=data['wedge'], shift=data['shift'],
                            components=dict(data['components']))


def _parse_vector_key(store: Dict[str, dict], key: str, value: str):
    _, name, attribute = key.split('.', 2)
    entry = store.setdefault(name, {})
    alpha = _parse_type_suffix(attribute)
    numbers = [float(v) for v in _split(value)]
    if len(numbers) not in (2, 3, 4):
        raise ValueError("expected a,theta0[,c_re[,c_im]]")
    if numbers[0] <= 0:
        raise ValueError("Gaussian width parameter a must be positive")
    c_re = numbers[2] if len(numbers) > 2 else 1.0
    c_im = numbers[3] if len(numbers) > 3 else 0.0
    entry[alpha] = GaussianSpec(numbers[0], numbers[1], complex(c_re, c_im))
