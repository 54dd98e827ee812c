"""Exception types shared across the simulator."""


class CapacityError(RuntimeError):
    """An evolution would carry amplitude past the allocated lattice edge."""


class OracleTooLargeError(ValueError):
    """The dense density-matrix oracle was asked for more steps than its size cap."""


class InsufficientDataError(ValueError):
    """A fit was requested with too few usable sample points."""


class NoTransitionError(Exception):
    """No crossing between measured and undisturbed survival was found.

    Carries the scanned (abscissa, gap) samples so callers can emit a
    structured no-transition report instead of a bare failure.
    """

    def __init__(self, message: str, scan=None):
        super().__init__(message)
        self.scan = list(scan) if scan is not None else []
