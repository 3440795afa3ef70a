"""Exception hierarchy shared by all loopdist modules."""


class LoopdistError(Exception):
    """Base class for every error raised by this package."""


# exact arithmetic
class DivisionByZeroFunction(LoopdistError, ZeroDivisionError):
    pass


class StarDiverges(LoopdistError, ZeroDivisionError):
    pass


class PoleAtZero(LoopdistError, ValueError):
    pass


# semigroups and graphs
class EmptyGenerators(LoopdistError, ValueError):
    pass


class ClosureCapExceeded(LoopdistError, RuntimeError):
    pass


class UnknownLabel(LoopdistError, ValueError):
    pass


class VertexCapExceeded(LoopdistError, RuntimeError):
    pass


class NotSimplePath(LoopdistError, ValueError):
    pass


class UspViolation(LoopdistError, ValueError):
    pass


class RecursionCapExceeded(LoopdistError, RuntimeError):
    pass


# markov chains
class ProbsNotNormalized(LoopdistError, ValueError):
    pass


class NonPositiveProbability(LoopdistError, ValueError):
    pass


class SingularSystem(LoopdistError, ArithmeticError):
    pass


class NotLeftZero(LoopdistError, ValueError):
    """Raised when the flat operation is disabled but K(S) is not left zero."""


class PipelineMismatch(LoopdistError, AssertionError):
    """Internal consistency check of the loop-graph pipeline failed."""


# model input
class ParseError(LoopdistError, ValueError):
    pass


class ValidationError(LoopdistError, ValueError):
    pass
