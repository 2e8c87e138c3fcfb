"""Exception taxonomy shared by all edgecrit modules."""


class EdgecritError(Exception):
    """Base class for all edgecrit errors."""


class NoConvergence(EdgecritError):
    """An iterative solve (Newton, continuation) stalled within its iteration cap."""


class DegenerateInterval(EdgecritError):
    """Support endpoints collapsed (b - a below tolerance) during iteration."""


class OutOfSupport(EdgecritError):
    """Density evaluation requested outside the open support interval."""


class AssumptionViolated(EdgecritError):
    """A structural assumption (edge criticality, positivity) fails."""


class QuadratureFailure(EdgecritError):
    """A quadrature did not converge to its requested tolerance."""


class PoleSuspected(EdgecritError):
    """BVP iterates blow up, indicating the wrong solution branch."""


class OutOfRange(EdgecritError):
    """Argument outside the domain covered by a stored grid/solution."""


class BranchCut(EdgecritError):
    """Evaluation requested on the branch cut of a fractional power."""


class PathFailure(EdgecritError):
    """ODE step control failed along a complex integration path."""


class ContaminationDetected(EdgecritError):
    """Reality/consistency invariant violated well beyond the error estimate."""


class CalibrationUnstable(EdgecritError):
    """Extracted calibration constants disagree between probe configurations."""


class PrecisionExhausted(EdgecritError):
    """Self-validation (digit/node doubling) disagrees at the requested tolerance."""


class NonPositiveNorm(EdgecritError):
    """Loss of orthogonality produced a non-positive squared norm."""


class ConfigError(EdgecritError):
    """Invalid or unknown configuration keys/values."""
