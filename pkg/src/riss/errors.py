"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid scheme parameters (bad order, grid, mode combination, ...)."""


class DerivativeUnavailableError(ValueError):
    """The requested mode needs derivative samples that do not exist.

    Raised e.g. for the trapezoidal stepper in exact-derivative mode when
    y'(0) is not finite; switch to a derivative-free mode (mod1/mod2).
    """


class ConvergenceFailureError(RuntimeError):
    """Implicit step root-find did not converge within the iteration cap."""

    def __init__(self, step_index, residual):
        self.step_index = step_index
        self.residual = residual
        super().__init__(
            f"root-find failed at step {step_index} (residual {residual:.3e})"
        )
