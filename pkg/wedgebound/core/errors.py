"""Exception hierarchy for wedgebound"""
from typing import Optional, Sequence


class WedgeboundError(Exception):
    """Base class for all domain errors"""


class ConfigError(WedgeboundError):
    """Unknown configuration key or unparseable value"""


class InvalidParameter(WedgeboundError, ValueError):
    """Model parameter outside its admissible range"""


class InvalidMass(InvalidParameter):
    """Non-positive mass"""


class NoFusionSolution(WedgeboundError):
    """The masses violate the triangle condition"""


class FusionThresholdError(NoFusionSolution):
    """The masses sit on the boundary of the triangle region"""


class PoleProximity(WedgeboundError):
    """Evaluation requested too close to a pole"""

    def __init__(self, pole: complex, message: Optional[str] = None):
        self.pole = pole
        super().__init__(message or f"evaluation within pole radius of {pole}")


class DependencyMissing(WedgeboundError):
    """A constituent S-matrix component has not been constructed yet"""


class PoleRefinementFailure(WedgeboundError):
    """Newton refinement of a pole candidate did not converge"""


class ContourConflict(WedgeboundError):
    """No admissible residue contour isolates the requested pole"""


class CalibrationFailure(WedgeboundError):
    """The eta fit did not reach the cancellation tolerance"""

    def __init__(self, message: str, residuals: Sequence[float] = ()):
        self.residuals = list(residuals)
        super().__init__(message)


class QuadratureError(WedgeboundError):
    """A quadrature did not converge"""

    def __init__(self, message: str, error_estimate: float = float('nan')):
        self.error_estimate = error_estimate
        super().__init__(f"{message} (error estimate {error_estimate:.3e})")


class DomainError(WedgeboundError):
    """A wavefunction pole violates the analyticity margin"""

    def __init__(self, pole: complex, message: Optional[str] = None):
        self.pole = pole
        super().__init__(message or f"wavefunction pole {pole} inside the shifted strip")


class RequestError(WedgeboundError):
    """Matrix-element request outside the supported scope"""
