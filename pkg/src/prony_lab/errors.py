"""Exception hierarchy shared by all solvers."""


class PronyError(Exception):
    """Base class for every error raised by the package."""


class SingularHankel(PronyError):
    """The Hankel system lost rank; ``rank`` is the detected effective rank."""

    def __init__(self, message, rank):
        super().__init__(message)
        self.rank = rank


class NoConvergence(PronyError):
    pass


class DuplicateNodes(PronyError):
    pass


class SingularMatrix(PronyError):
    pass


class AmplitudeBelowFloor(PronyError):
    pass


class NodeCollision(PronyError):
    pass


class MultiplicityMismatch(PronyError):
    pass


class AmbiguousAmplitudes(PronyError):
    pass


class InconsistentAxes(PronyError):
    pass


class ZeroMeanKernel(PronyError):
    pass


class ZeroFourierCoefficient(PronyError):
    pass


class InsufficientMoments(PronyError):
    pass


class InconsistentJumps(PronyError):
    pass


class QuadratureNotConverged(PronyError):
    pass


class SolveFailed(PronyError):
    pass


class ConfigInvalid(PronyError):
    pass
