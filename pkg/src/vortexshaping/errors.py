"""Exception hierarchy shared by all modules."""


class VortexShapingError(Exception):
    """Base class for errors raised by this package."""


class NumericalError(VortexShapingError):
    """A numerical procedure failed (CLI exit code 3)."""


class GridTooNarrow(NumericalError):
    """Field does not decay to (near) zero at the edge of the sampling grid."""


class NonPositiveDistance(VortexShapingError, ValueError):
    pass


class UpstreamPlane(VortexShapingError, ValueError):
    """Requested plane lies at or before the vortex retarder."""


class UnsupportedOrder(VortexShapingError, ValueError):
    pass


class IntegratorFailure(NumericalError):
    pass


class BadReference(VortexShapingError, ValueError):
    """Background minus dark frame is not strictly positive."""


class NoSignal(NumericalError):
    pass


class FitDiverged(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass


class InsufficientData(VortexShapingError, ValueError):
    pass


class InvalidQuantumNumbers(VortexShapingError, ValueError):
    pass


class NoSteadyState(NumericalError):
    pass


class ZeroCoupling(VortexShapingError, ValueError):
    pass


class ConfigError(VortexShapingError, ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class UnknownFigure(VortexShapingError, KeyError):
    """Unknown preset id (CLI exit code 4)."""

    def __str__(self):
        return Exception.__str__(self)
