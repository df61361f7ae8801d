"""Exception hierarchy shared by all modules."""


class EisenlabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(EisenlabError, ValueError):
    """A point lies outside (or too close to the edge of) an admissible region.

    ``time`` is set when the error comes from a trajectory leaving the domain.
    """

    def __init__(self, message, time=None, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory


class NonFiniteError(EisenlabError, ArithmeticError):
    pass


class DimensionMismatch(EisenlabError, ValueError):
    pass


class SpecError(EisenlabError, ValueError):
    pass


class UnknownObservable(EisenlabError, KeyError):
    pass


class SingularMetric(EisenlabError, ArithmeticError):
    pass


class DegreeError(EisenlabError, ValueError):
    pass


class ArgumentError(EisenlabError, ValueError):
    pass


class ConvergenceError(EisenlabError, RuntimeError):
    pass


class SamplerExhausted(EisenlabError, RuntimeError):
    pass
