"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class EspecError(Exception):
    exit_code = 1


class InvalidParams(EspecError, ValueError):
    exit_code = 2


class EngineMismatch(InvalidParams):
    pass


class NotConverged(EspecError):
    exit_code = 3


class NonSymmetricOperator(EspecError):
    exit_code = 3


class GaplessError(EspecError):
    exit_code = 4


class DegenerateGroundState(EspecError):
    exit_code = 5


class SectorTooLarge(EspecError):
    exit_code = 6


class SpectrumOutOfRange(EspecError):
    pass


class NegativeEigenvalue(EspecError):
    pass


class EmptySpectrum(EspecError):
    pass


class AuditMismatch(EspecError):
    """Two engines disagree where both are valid."""
