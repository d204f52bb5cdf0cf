"""Exception hierarchy shared by every trspec module."""


class TrspecError(Exception):
    """Base class for all errors raised by trspec."""


class InputError(TrspecError, ValueError):
    """Malformed input: wrong shapes, non-finite entries, bad parameters."""


class NonSquareError(InputError):
    pass


class NonFiniteError(InputError):
    pass


class OrderTooLargeError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class NonPositiveLengthError(InputError):
    pass


class NonPositiveDeltaError(InputError):
    pass


class NonPositiveRatesError(InputError):
    pass


class IrrationalInputUnsupportedError(InputError):
    """Floating point velocities were passed where exact rationals are required."""


class OddGridError(InputError):
    pass


class GridTooCoarseError(InputError):
    pass


class ImaginaryResidueError(TrspecError):
    """A synthesized field carried a non-negligible imaginary part."""


class NoConvergenceError(TrspecError, ArithmeticError):
    pass


class DegenerateVelocitiesError(TrspecError):
    """Two transport velocities coincide (within tolerance)."""


class BelowThresholdError(TrspecError):
    """A mode index is below the perturbation-series validity threshold."""


class PreconditionUnmetError(TrspecError):
    pass


class NonPositiveLambdaError(TrspecError):
    """Goldstein-Kac turning rate is not positive, so there is no decay rate.

    ``growth_rate`` holds the spectral bound of the (unstable or marginal) model.
    """

    def __init__(self, message, growth_rate):
        super().__init__(message)
        self.growth_rate = growth_rate


class DegenerateDataError(TrspecError):
    pass


class AmbiguousMatchWarning(UserWarning):
    """Two branch matchings tied; the first one was taken."""


class ConjugateSymmetryError(InputError):
    """Fourier coefficients do not describe a real field: u(-k) != conj(u(k))."""

