"""Error hierarchy.

Two roots: ``InvalidInput`` (bad parameters, CLI exit code 2) and
``NumericalFailure`` (a computation that could not finish, exit code 1).
"""


class SineGordonError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class InvalidInput(SineGordonError, ValueError):
    exit_code = 2


class NumericalFailure(SineGordonError, ArithmeticError):
    exit_code = 1


# invalid input
class ParamOutOfRange(InvalidInput):
    pass


class DegenerateSpectrum(InvalidInput):
    pass


class CutsOverlap(InvalidInput):
    pass


class ZeroEnergy(InvalidInput):
    pass


class CaseMismatch(InvalidInput):
    pass


class SpectraMismatch(InvalidInput):
    pass


class ParityUntagged(InvalidInput):
    pass


class SingularModulus(InvalidInput):
    pass


class GridTooCoarse(InvalidInput):
    pass


class AnalyticContinuationUnavailable(InvalidInput):
    pass


# numerical failure
class PoleEncountered(NumericalFailure):
    """A ratio function hit a zero of its denominator."""

    def __init__(self, function, location, message=None):
        self.function = function
        self.location = location
        super().__init__(message or f"{function} has a pole near u = {location}")


class NonConvergent(NumericalFailure):
    pass


class QuadratureNoConvergence(NumericalFailure):
    pass


class BranchTrackingFailure(NumericalFailure):
    pass


class CalibrationFailed(NumericalFailure):
    pass


class SingularDenominator(NumericalFailure):
    pass


class ThetaZero(NumericalFailure):
    pass


class IntegratorTolExceeded(NumericalFailure):
    pass
