class DomainError(ValueError):
    """A point or zero lies where the operation is undefined."""


class BandwidthError(ValueError):
    """The FFT grid cannot hold the requested product without aliasing."""


class NumericalInconsistencyError(ArithmeticError):
    """Two independent computational paths disagree beyond tolerance."""


class QuadratureError(NumericalInconsistencyError):
    """A quadrature or reconstruction grid is too coarse."""
