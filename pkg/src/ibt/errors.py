"""Exception types shared across the package."""


class IbtError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(IbtError, ValueError):
    """A constructor or operation received parameters outside its domain."""


class DomainError(IbtError, ValueError):
    """An evaluation point lies outside the function's domain."""


class NumericError(IbtError, RuntimeError):
    """A numeric routine (quadrature, root finding, eigensolve) failed to converge."""


class NearCutError(IbtError, ValueError):
    """A point landed within the exclusion window of the cut abscissa A.

    Orbits through the singular line x = A abort loudly instead of being
    perturbed; silent perturbation would bias return-time statistics.
    """

    def __init__(self, x, index=None):
        self.x = x
        self.index = index
        msg = f"point x={x!r} is within 1e-12 of the cut abscissa"
        if index is not None:
            msg += f" (at iterate k={index})"
        super().__init__(msg)


class TailOverflowError(IbtError, RuntimeError):
    """A return-time query exceeded the configured cap r_max.

    Callers treat this as a censored observation, never a silent drop.
    """

    def __init__(self, x, r_max):
        self.x = x
        self.r_max = r_max
        super().__init__(f"return time of x={x!r} exceeds cap r_max={r_max}")
