"""Numeric failure types shared across modules.

The CLI maps every subclass of :class:`NumericError` to exit code 3.
"""


class NumericError(ArithmeticError):
    pass


class SingularMatrix(NumericError):
    pass


class NoConvergence(NumericError):
    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = list(partial)


class ClusterOverlap(NumericError):
    pass


class ContourTooClose(NumericError):
    pass


class DegenerateSpectrum(NumericError):
    pass


class JetOverflow(NumericError):
    pass


class NotInvertible(NumericError):
    pass
