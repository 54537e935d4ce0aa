"""Exception hierarchy shared by the solvers, the simulator and the CLI."""


class PiModelError(Exception):
    """Base class for every error raised by this package."""


class InvalidScaleError(PiModelError, ValueError):
    pass


class DimensionError(PiModelError, ValueError):
    pass


class ModelValidationError(PiModelError, ValueError):
    """A model table violates a well-formedness condition (normalization, stay action, ...)."""


class PreconditionError(PiModelError, ValueError):
    pass


class InvariantError(PiModelError, RuntimeError):
    """An internal bound was exceeded; signals a model outside the solver's hypotheses."""


class ImpossibleObservationError(PiModelError, ValueError):
    """The observation has possibility 0 under the current belief, so revision is undefined."""


class BeliefSpaceTooLargeError(PiModelError, ValueError):
    def __init__(self, cardinality, cap):
        self.cardinality = cardinality
        self.cap = cap
        super().__init__(
            f"belief space too large to enumerate: cardinality {cardinality} (cap {cap})"
        )


class NonConvergenceError(PiModelError, RuntimeError):
    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"value iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3g})"
        )
