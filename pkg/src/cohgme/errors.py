"""Exception hierarchy. Every input-validation failure is a ``ValidationError``."""


class ValidationError(ValueError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class EmptyKeepSet(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class InvalidRank(ValidationError):
    pass


class NotASimplexVector(ValidationError):
    pass


class NotADiagonalCorrelationState(ValidationError):
    pass


class NotAnIsometry(ValidationError):
    pass


class RankMismatch(ValidationError):
    pass


class RankTooHigh(ValidationError):
    pass


class AncillaTooSmall(ValidationError):
    pass


class PositivityViolated(ValidationError):
    pass
