"""Exception hierarchy. CLI exit codes key off these classes."""


class RadcurvError(Exception):
    """Base class for all package errors."""


class ConfigError(RadcurvError):
    pass


class ExpressionSyntaxError(RadcurvError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(RadcurvError, ValueError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class NumericError(RadcurvError):
    """Any failure of a numerical routine (exit code 3)."""


class DomainError(NumericError, ValueError):
    pass


class OutOfDomain(NumericError, ValueError):
    pass


class ParamRange(NumericError, ValueError):
    pass


class SolverDiverged(NumericError):
    pass


class DomainEmpty(NumericError):
    pass


class QuadratureFailure(NumericError):
    pass


class BadCurvatureRange(ParamRange):
    pass


class UnsupportedBase(NumericError, ValueError):
    pass


class HypothesisViolated(NumericError):
    pass


class NoRoot(NumericError):
    pass


class LadderTooShort(NumericError, ValueError):
    pass


class EigensolveFailure(NumericError):
    pass


class OptimizerStalled(NumericError):
    pass


class NotIntegrable(NumericError, ValueError):
    pass


class StepRejected(NumericError):
    pass


class TauTooSmall(NumericError, ValueError):
    pass
