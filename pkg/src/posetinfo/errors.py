"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for malformed input
(CLI exit status 1) and :class:`SolverError` for numerical failures (exit 2).
"""


class PosetInfoError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message, *, label=None, source=None):
        super().__init__(message)
        self.label = label
        self.source = source

    def __str__(self):
        msg = super().__str__()
        where = []
        if self.source is not None:
            where.append(str(self.source))
        if self.label is not None:
            where.append(f"label {self.label!r}")
        return f"{msg} ({', '.join(where)})" if where else msg


class ValidationError(PosetInfoError, ValueError):
    pass


class SolverError(PosetInfoError, RuntimeError):
    pass


# poset construction and queries
class CycleDetected(ValidationError):
    pass


class MultipleMinimalElements(ValidationError):
    pass


class DuplicateLabel(ValidationError):
    pass


class RedundantCoverEdge(ValidationError):
    pass


class UnknownElement(ValidationError):
    pass


class UnknownLabel(UnknownElement):
    pass


class JoinDoesNotExist(ValidationError):
    pass


class PosetMismatch(ValidationError):
    pass


class PosetTooLarge(ValidationError):
    pass


# distributions and coordinates
class NonPositiveProbability(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class InconsistentEta(ValidationError):
    pass


class InvalidSubset(ValidationError):
    pass


class NotAChain(ValidationError):
    pass


class InvalidDof(ValidationError):
    pass


# structure learning
class EmptyModel(ValidationError):
    pass


class NoBottom(ValidationError):
    pass


# numerical
class NoFeasibleBracket(SolverError):
    pass


class MaxIterations(SolverError):
    pass


class MaxOuterIterations(SolverError):
    pass
