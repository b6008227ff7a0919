"""Exception hierarchy for the thermalization engine."""


class VdbThermError(Exception):
    """Base class for all engine errors."""


class DegeneracyError(VdbThermError):
    """Ring spectrum has (numerically) degenerate levels; the rate-equation
    treatment assumes non-degeneracy."""


class ZeroCouplingError(VdbThermError):
    """All off-diagonal couplings vanish (u = 0), so the requested quantity
    is undefined."""


class PoleOnContourError(VdbThermError):
    """|D_T(E)| fell below the safety floor on the integration contour,
    signalling a resonance/bound-state pathology for these parameters."""


class BranchError(VdbThermError):
    """Energy/pair combination outside the admissible branch of the
    closed-form T-matrix."""


class QuadratureError(VdbThermError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the partial estimate and its error bound.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class RangeError(VdbThermError):
    """Parameter outside the supported numeric range."""


class DimensionError(VdbThermError):
    """Operation requires a specific matrix dimension (N = 3)."""


class NoRootError(VdbThermError):
    """No sign change of the discriminant on the supplied bracket."""


class ConditioningError(VdbThermError):
    """Spectral decomposition too ill-conditioned to trust; use the
    matrix-exponential oracle instead."""


class NormalizationError(VdbThermError):
    """Observable undefined because its normalizer vanishes (e.g. initial
    distance to the thermal state is zero)."""


class InputError(VdbThermError):
    """Invalid caller-supplied data (bad probability vector, bad config)."""


class ConfigError(VdbThermError):
    """Experiment configuration could not be parsed or validated."""
