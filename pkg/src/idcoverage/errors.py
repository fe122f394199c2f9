"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge.

    Carries the residual error estimate reported by the integrator so the
    caller can decide whether the partial result is usable.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConcavityError(ValueError):
    """A rectangle weight came out genuinely negative.

    Names the offending (i, j) entry; raised when the correlation function
    handed to the weight builder is not concave enough to act as one.
    """

    def __init__(self, i, j, value):
        super().__init__(
            f"weight a[{i},{j}] = {value:.3e} is below -1e-9; "
            "the correlation function is not concave on this grid"
        )
        self.index = (i, j)
        self.i, self.j = i, j
        self.value = value


class UnsupportedMomentError(ValueError):
    """A requested moment does not exist for this law."""


class BoundViolationError(AssertionError):
    """A checked analytic bound failed.

    Carries a dict of the offending values for reporting.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}
