"""Exception types raised by the simulator."""


class MingError(Exception):
    """Base class for all simulator errors."""


class NonPrimeN(MingError, ValueError):
    pass


class CapExceeded(MingError, ValueError):
    pass


class FixedPointInput(MingError, ValueError):
    pass


class NotNormalized(MingError, ValueError):
    pass


class QuadratureUnderresolved(MingError, ValueError):
    pass


class IllFormedObservable(MingError, ValueError):
    pass
