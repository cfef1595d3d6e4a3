"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operand shapes are incompatible."""


class InvalidTruncation(ValueError):
    """Truncation level r is outside [0, min(I1, I2))."""


class ConvergenceFailure(RuntimeError):
    """The underlying LAPACK SVD did not converge."""


class IterationLimit(RuntimeWarning):
    """A solver loop hit its iteration cap before meeting its tolerance.

    Soft failure: solvers emit it as a warning and still return their last
    iterate, with ``converged=False`` in the report.
    """
