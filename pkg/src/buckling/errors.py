"""Exception hierarchy shared by every module of the package."""


class BucklingError(Exception):
    """Base class for all errors raised by this package."""


# spectrum ingestion

class EmptyInput(BucklingError, ValueError):
    pass


class NonPositiveEigenvalue(BucklingError, ValueError):
    pass


class ParseError(BucklingError, ValueError):
    """A spectrum file could not be parsed.

    ``line`` and ``field`` locate the offending input when known.
    """

    def __init__(self, message, line=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.field = field


class SchemaError(BucklingError, ValueError):
    pass


class SpectrumIOError(BucklingError, OSError):
    pass


# bound engine

class FormMismatch(BucklingError, ValueError):
    pass


class MissingDelta(BucklingError, ValueError):
    pass


class NonMonotoneDelta(BucklingError, ValueError):
    pass


class SphereBelowThreshold(BucklingError, ValueError):
    pass


class NegativeDiscriminant(BucklingError, ArithmeticError):
    pass


class UnboundedObjective(BucklingError, ArithmeticError):
    pass


class BracketingFailure(BucklingError, ArithmeticError):
    pass


class NonPositiveCoefficient(BucklingError, ValueError):
    pass


# discretization and solvers

class ResolutionTooCoarse(BucklingError, ValueError):
    pass


class ApertureOutOfRange(BucklingError, ValueError):
    pass


class ConvergenceFailure(BucklingError, ArithmeticError):
    pass


class InnerSolveFailure(BucklingError, ArithmeticError):
    pass


class DimensionTooLarge(BucklingError, ValueError):
    pass


class RangeError(BucklingError, ValueError):
    pass


class SingularProjection(BucklingError, ArithmeticError):
    pass
