"""Exception types shared across the package."""


class SpinforgeError(Exception):
    """Base class for all package-specific errors."""


class ConstraintViolationError(SpinforgeError, ValueError):
    """A pulse parametrization violates the |chi_dot| <= |delta|/2 bound."""


class SingularityError(SpinforgeError, ValueError):
    """The reverse-engineered drive hit a non-removable cot(2*chi) pole."""


class InvariantMismatchError(SpinforgeError, ValueError):
    """Gate is not locally equivalent to the requested target."""


class DiagonalityError(SpinforgeError, ValueError):
    """Conditional-phase extraction asked of an insufficiently diagonal gate."""


class SampleRejectedError(SpinforgeError):
    """A noise draw produced an unphysical parameter set (e.g. J <= 0)."""
