"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was called with inputs outside its domain.

    The message always starts with the operation name so that the CLI can
    report which precondition was violated.
    """

    def __init__(self, op: str, message: str):
        self.op = op
        super().__init__(f"{op}: {message}")


class ConvergenceError(RuntimeError):
    """Root refinement did not converge within its iteration budget."""
