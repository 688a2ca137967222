"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class MeroformsError(Exception):
    code = "Error"


class SplitFieldRequired(MeroformsError):
    """A polynomial has an irreducible factor of degree >= 2 over the rationals."""

    code = "SplitFieldRequired"


class PoleEvaluation(MeroformsError):
    code = "PoleEvaluation"


class DivisionByZeroFunction(MeroformsError, ZeroDivisionError):
    code = "DivisionByZeroFunction"


class ConstantMap(MeroformsError):
    code = "ConstantMap"


class InvalidForm(MeroformsError):
    code = "InvalidForm"


class PreconditionViolated(MeroformsError):
    code = "PreconditionViolated"


class DegreeMismatch(MeroformsError):
    code = "DegreeMismatch"


class TrivialPartition(MeroformsError):
    code = "TrivialPartition"


class RiemannHurwitzViolation(MeroformsError):
    code = "RiemannHurwitzViolation"


class LimitExceeded(MeroformsError):
    code = "LimitExceeded"


class NotGeneralType(MeroformsError):
    code = "NotGeneralType"


class SearchSpaceExceeded(MeroformsError):
    code = "SearchSpaceExceeded"


class NotSynthesized(MeroformsError):
    code = "NotSynthesized"


class CoordinateCollision(MeroformsError):
    code = "CoordinateCollision"


class ShapeMismatch(MeroformsError):
    code = "ShapeMismatch"


class InfeasibleParameters(MeroformsError):
    code = "InfeasibleParameters"


class HypothesisViolated(MeroformsError):
    code = "HypothesisViolated"


class ResidueSumNonzero(MeroformsError):
    code = "ResidueSumNonzero"


class ParseError(MeroformsError):
    """Malformed textual input; ``position`` is a 0-based column."""

    code = "SyntaxError"

    def __init__(self, message, position=None):
        self.message = message
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
