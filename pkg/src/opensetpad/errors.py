"""Exception hierarchy.

:class:`ValidationError` subclasses describe bad data or impossible requests
(CLI exit code 1). :class:`ParseError` covers unreadable input (exit code 2).
"""


class OpenSetPadError(Exception):
    pass


class ParseError(OpenSetPadError):
    pass


class ValidationError(OpenSetPadError):
    pass


class DuplicateId(ValidationError):
    pass


class InvalidEnum(ValidationError):
    pass


class TaxonomyViolation(ValidationError):
    pass


class OneClassInput(ValidationError):
    pass


class EmptyHoldout(ValidationError):
    pass


class MissingBonafide(ValidationError):
    pass


class OneClassTrain(ValidationError):
    pass


class UnknownDataset(ValidationError):
    pass


class MissingSpectrum(ValidationError):
    pass


class DegenerateDispersion(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ZeroBaselineRatio(ValidationError):
    pass


class ZeroBaselineDispersion(ValidationError):
    pass
