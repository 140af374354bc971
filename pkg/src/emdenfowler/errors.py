"""Exception hierarchy shared by all modules."""


class EmdenFowlerError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EmdenFowlerError, ValueError):
    """Argument outside the real domain of a formula."""


class PoleProximity(DomainError):
    """Evaluation point sits on (or numerically at) a pole."""


class DegenerateCubic(DomainError):
    pass


class NegativeRadicand(DomainError):
    pass


class NotARoot(DomainError):
    pass


class NoRealRoot(DomainError):
    pass


class NEqualsOne(DomainError):
    pass


class NEqualsMinusOne(DomainError):
    pass


class NegativeBase(DomainError):
    pass


class PoleCrossing(DomainError):
    pass


class EmptyTrajectory(DomainError):
    pass


class RadicandNonpositive(DomainError):
    def __init__(self, tau, value):
        super().__init__(f"radicand {value:.3e} <= 1e-10 at tau={tau!r}")
        self.tau = tau
        self.value = value


class ThetaZeroCrossing(DomainError):
    pass


class GridTooShort(DomainError):
    pass


class ChiNotMonotone(DomainError):
    pass


class UnsupportedN(DomainError):
    pass


class K4Zero(DomainError):
    pass


class StepSizeUnderflow(EmdenFowlerError, RuntimeError):
    pass
