"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when an argument lies outside the open interval an operation is defined on."""


class BracketError(RuntimeError):
    """No sign change of the shooting defect inside the requested slope bracket."""


class DivergenceError(RuntimeError):
    """The integrator blew up or its step size underflowed.

    ``t_last`` is the last abscissa at which the state was still finite and bounded.
    """

    def __init__(self, message: str, t_last: float):
        super().__init__(f"{message} (last valid t = {t_last:.17g})")
        self.t_last = t_last


class ConvergenceError(RuntimeError):
    """An iterative solver (eigensolver, root finder) failed to converge."""
